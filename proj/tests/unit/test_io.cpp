#include <doctest.h>

#include "weiermnv/errors.hpp"
#include "weiermnv/io.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace wmnv;
using std::numbers::pi;

namespace {

ErrorCode code_of(const auto &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::Io;
}

} // namespace

TEST_CASE("numbers and complex literals") {
    for (double x : {0.1, -1.0 / 3.0, 6.02e23, 5e-324, 22.79290134321})
        CHECK(std::strtod(io::number(x).c_str(), nullptr) == x);
    CHECK(io::number(2.0) == "2");
    CHECK(io::parse_complex("1") == cplx(1.0, 0.0));
    CHECK(io::parse_complex("1+0i") == cplx(1.0, 0.0));
    CHECK(io::parse_complex("-0.5+2i") == cplx(-0.5, 2.0));
    CHECK(io::parse_complex("0.3-1e-2i") == cplx(0.3, -0.01));
    CHECK(io::parse_complex("1e+2-i") == cplx(100.0, -1.0));
    CHECK(io::parse_complex("2i") == cplx(0.0, 2.0));
    CHECK(io::parse_complex("-i") == cplx(0.0, -1.0));
    CHECK(io::parse_complex("(0.6, -1)") == cplx(0.6, -1.0));
    CHECK(io::parse_complex(" +4 ") == cplx(4.0, 0.0));
    CHECK_THROWS_AS((void)io::parse_complex("one"), Error);
    CHECK_THROWS_AS((void)io::parse_complex(""), Error);
    CHECK_THROWS_AS((void)io::parse_complex("1+2"), Error);
}

TEST_CASE("field, immersion and spinor round-trip through JSON") {
    const auto g = TorusGrid::make({0.25, 1.5}, 8, 6);
    const auto f = ScalarField::sample(g, [](double a, double b) { return cplx(std::sin(2 * pi * a) / 3.0, b * b); });
    const auto back = io::field_from_json(io::json::parse(io::to_json(f).dump()));
    CHECK(back.grid() == g);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);
    CHECK(io::field_from_json(io::json{{"potential", io::to_json(f)}}).grid() == g);

    const auto X = revolve(ProfileCurve::torus(2.0, 1.0), 8, 8);
    const auto Y = io::immersion_from_json(io::json::parse(io::json{{"immersion", io::to_json(X)}}.dump()));
    CHECK(Y.grid() == X.grid());
    for (std::size_t i = 0; i < X.points().size(); ++i) CHECK((Y.points()[i] - X.points()[i]).norm() == 0.0);

    const SpinorField s(f, 2.0 * f, -1, 1);
    const auto t = io::spinor_from_json(io::to_json(s));
    CHECK(t.mult1 == -1);
    CHECK(t.mult2 == 1);
    CHECK(t.psi2[5] == 2.0 * f[5]);

    auto broken = io::to_json(f);
    broken["values"].erase(0);
    CHECK(code_of([&] { (void)io::field_from_json(broken); }) == ErrorCode::Io);
    CHECK(code_of([&] { (void)io::immersion_from_json(io::json{{"nx", 8}}); }) == ErrorCode::Io);
    auto bad_tau = io::to_json(f);
    bad_tau["tau_im"] = -1.0;
    CHECK(code_of([&] { (void)io::field_from_json(bad_tau); }) == ErrorCode::NonPositiveImaginaryModulus);
}

TEST_CASE("profiles from text") {
    std::string csv = "s,r,h\n";
    for (int i = 0; i < 16; ++i) {
        const double s = 2 * pi * i / 16;
        csv += io::number(s) + "," + io::number(2.0 + std::cos(s)) + "," + io::number(std::sin(s)) + "\n";
    }
    const auto p = io::profile_from_text(csv);
    CHECK(p.r(0.3) == doctest::Approx(2.0 + std::cos(0.3)).epsilon(1e-12));

    const auto q = io::profile_from_text(R"({"fourier_r": [[2, 0], [1, 0]], "fourier_h": [[0, 0], [0, 1]]})");
    CHECK(q.h(0.7) == doctest::Approx(std::sin(0.7)).epsilon(1e-12));

    CHECK(code_of([&] { (void)io::profile_from_text("s,r,h\n0,1,0\n1,-0.5,1\n2,1,0\n"); }) ==
          ErrorCode::DegenerateProfile);
    CHECK(code_of([&] { (void)io::profile_from_text("a,b\n1,2\n"); }) == ErrorCode::Io);
    CHECK(code_of([&] { (void)io::profile_from_text("{\"fourier_r\": 3}"); }) == ErrorCode::Io);
    CHECK(code_of([&] { (void)io::profile_from_text("   "); }) == ErrorCode::Io);

    CHECK(io::torus_from_spec("R=2,r=1").r(0.0) == doctest::Approx(3.0));
    CHECK(io::torus_from_spec("r=0.5, R=3").r(pi) == doctest::Approx(2.5));
    CHECK(code_of([] { (void)io::torus_from_spec("R=1,r=1"); }) == ErrorCode::DegenerateProfile);
    CHECK(code_of([] { (void)io::torus_from_spec("R=2"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)io::torus_from_spec("R=2,q=1"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("report tables") {
    InvarianceReport r;
    r.transform = "dilation:2";
    r.rows = {{1, {-3.0, 0.0}, {-3.0, 1e-12}, 1e-12, 3e-13}};
    CHECK(io::invariance_csv({r}) == "k,re_before,im_before,re_after,im_after,abs_diff,rel_diff\n"
                                      "1,-3,0,-3,1e-12,1e-12,3e-13\n");
    CHECK(io::invariance_csv({r, r}).rfind("transform,k,", 0) == 0);

    SliceResult s;
    s.M = 9;
    s.nx = 8;
    s.ny = 4;
    s.points.push_back({1.0, {0.5, -0.25}, 0.0, 0.1, 0, 0, 1e-14});
    CHECK(io::slice_csv(s) == "k,re_w2,im_w2,residual,M,nx,ny\n0,0.5,-0.25,1e-14,9,8,4\n");
    CHECK(io::to_json(s)["points"][0]["w2"][1] == -0.25);

    const std::vector<TrajectoryRow> rows{{0.5, {-2.0, 0.0}, {1.0, -0.5}, 3.0, 4.0}};
    CHECK(io::trajectory_csv(rows) == "t,h1_re,h3_re,h3_im,l2_norm,linf_norm\n0.5,-2,1,-0.5,3,4\n");

    MonodromyData m;
    m.kappa = 0.5;
    CHECK(io::to_json(m)["matrix"][1][1][0] == 1.0);

    InvariantVector v;
    v.h = {-1.0, 0.0, 2.0};
    const auto j = io::to_json(v);
    CHECK(j["K"] == 3);
    CHECK(j["h"][2][0] == 2.0);
}

TEST_CASE("missing files") {
    CHECK(code_of([] { (void)io::read_text("/nonexistent/dir/x.json"); }) == ErrorCode::Io);
    CHECK(code_of([] { io::write_text("/nonexistent/dir/x.json", "{}"); }) == ErrorCode::Io);
}
