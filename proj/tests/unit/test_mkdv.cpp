#include <doctest.h>

#include "weiermnv/bloch.hpp"
#include "weiermnv/errors.hpp"
#include "weiermnv/fft.hpp"
#include "weiermnv/mkdv.hpp"
#include "weiermnv/weierstrass.hpp"

#include <cmath>
#include <numbers>

using namespace wmnv;
using std::numbers::pi;

namespace {

std::vector<double> potential_row(const ProfileCurve &profile, int n) {
    const auto U = extract_potential(revolve(profile, n, n), 1e-4);
    std::vector<double> row(U.grid().nx());
    for (int j = 0; j < U.grid().nx(); ++j) row[j] = U(j, 0).real();
    return row;
}

std::vector<double> smooth_row() {
    std::vector<double> u(64);
    for (int j = 0; j < 64; ++j) u[j] = 1.0 + 0.5 * std::cos(2 * pi * j / 64.0) + 0.3 * std::sin(4 * pi * j / 64.0);
    return u;
}

cplx first_mode(const std::vector<double> &u) {
    const int n = static_cast<int>(u.size());
    std::vector<cplx> in(u.begin(), u.end()), out(n);
    fft::forward_1d(n, in, out);
    return out[1] / double(n);
}

double max_diff(const std::vector<double> &a, const std::vector<double> &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("constant data is stationary") {
    FlowState s{std::vector<double>(32, 0.7), 0.0, 24.0, 1.0};
    const auto rows = integrate(s, 1e-4, 50, 10);
    CHECK(max_diff(s.u, std::vector<double>(32, 0.7)) < 1e-14);
    CHECK(s.t == doctest::Approx(5e-3));
    CHECK(rows.size() == 6);
}

TEST_CASE("small harmonic follows linear dispersion") {
    const int n = 32;
    const double eps = 1e-4, k = 2 * pi, T = 2 * pi / std::pow(k, 3);
    std::vector<double> u(n);
    for (int j = 0; j < n; ++j) u[j] = eps * std::cos(k * j / n);
    FlowState s{u, 0.0, 24.0, 1.0};
    const int steps = 400;
    (void)integrate(s, T / steps, steps, steps);
    const cplx a0 = first_mode(u), a1 = first_mode(s.u);
    CHECK(std::abs(std::abs(a1) / std::abs(a0) - 1.0) < 1e-8);
    // e^{ikx} carries e^{-ik^3 t}: one full turn over T, minus a weak cubic shift.
    CHECK(std::abs(std::arg(a1 / a0)) < 1e-5);

    FlowState half{u, 0.0, 24.0, 1.0};
    (void)integrate(half, T / steps, steps / 4, steps);
    CHECK(std::abs(a1 / a0 - 1.0) < 1e-5);
    CHECK(std::abs(first_mode(half.u) / a0 - std::exp(cplx(0.0, -pi / 2))) < 1e-5);
}

TEST_CASE("L2 norm and invariants are conserved") {
    FlowState s{smooth_row(), 0.0, 24.0, 1.0};
    const double dt = 0.02 * stability_budget(s);
    const auto rows = integrate(s, dt, 1000, 100);
    const auto &a = rows.front(), &b = rows.back();
    CHECK(std::abs(b.l2_norm / a.l2_norm - 1.0) < 1e-10);
    CHECK(std::abs(b.h1 - a.h1) / std::abs(a.h1) < 1e-9);
    CHECK(std::abs(b.h3 - a.h3) / std::abs(a.h3) < 1e-6);
    CHECK(std::abs(a.h3) > 1.0);
    CHECK(max_diff(s.u, smooth_row()) > 1e-2);
}

TEST_CASE("stepping backwards retraces the trajectory") {
    const auto u0 = smooth_row();
    FlowState s{u0, 0.0, 24.0, 1.0};
    const double dt = 0.01 * stability_budget(s);
    (void)integrate(s, dt, 200, 200);
    (void)integrate(s, -dt, 200, 200);
    CHECK(max_diff(s.u, u0) < 1e-10);
    CHECK(std::abs(s.t) < 1e-15);
}

TEST_CASE("step size and state validation") {
    FlowState s{smooth_row(), 0.0, 24.0, 1.0};
    const double budget = stability_budget(s);
    CHECK_THROWS_AS((void)step(s, 1.5 * budget), Error);
    CHECK_NOTHROW((void)step(s, 0.9 * budget));
    CHECK_THROWS_AS((void)step(s, 0.0), Error);
    CHECK_THROWS_AS((void)step(FlowState{std::vector<double>(7, 1.0)}, 1e-6), Error);
    FlowState bad = s;
    bad.u[3] = std::nan("");
    CHECK_THROWS_AS((void)step(bad, 1e-6), Error);

    for (double &x : s.u) x *= 10.0;
    const MkdvStepper reckless(static_cast<int>(s.u.size()), 1.0, 24.0, 40.0 * stability_budget(s), false);
    try {
        for (int i = 0; i < 200; ++i) s = reckless.step(s);
        FAIL("expected BlowupDetected");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::BlowupDetected);
    }
}

TEST_CASE("lift is an x-only field on a rectangular lattice") {
    FlowState s{smooth_row(), 0.0, 24.0, 2.0};
    const auto U = lift(s, 6, 3.0);
    CHECK(U.grid().ny() == 6);
    CHECK(std::abs(U.grid().tau() - cplx(0.0, 1.5)) < 1e-15);
    CHECK(U(5, 4).real() == doctest::Approx(2.0 * s.u[5]));
    CHECK(std::abs(lift(s).grid().tau() - cplx(0.0, 1.0)) < 1e-15);
}

TEST_CASE("calibration singles out the conserving coefficient") {
    for (const auto &u0 : {smooth_row(), potential_row(ProfileCurve::torus(2.0, 1.0), 64)}) {
        const auto cal = calibrate_coefficient(u0, 1.0);
        CHECK(!cal.degenerate);
        CHECK(cal.c_star == doctest::Approx(24.0).epsilon(1e-4));
        CHECK(cal.drift_at_c_star < 1e-6);
        for (const auto &p : cal.curve) {
            CAPTURE(p.c);
            CHECK(p.h1_drift < 1e-9);
            if (std::abs(p.c - cal.c_star) >= 12.0) CHECK(p.h3_drift > 1e-3);
        }
        CHECK(cal.curve.size() == 13);
    }
}

TEST_CASE("calibration of degenerate and hopeless inputs") {
    const auto flat = calibrate_coefficient(std::vector<double>(32, 1.3), 1.0);
    CHECK(flat.degenerate);
    CHECK(!flat.note.empty());

    CalibrationOptions narrow;
    narrow.c_min = 40.0;
    narrow.c_max = 48.0;
    narrow.candidates = 3;
    narrow.steps = 2000;
    try {
        (void)calibrate_coefficient(smooth_row(), 1.0, narrow);
        FAIL("expected NoConservingCandidate");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::NoConservingCandidate);
    }
    narrow.candidates = 2;
    CHECK_THROWS_AS((void)calibrate_coefficient(smooth_row(), 1.0, narrow), Error);
}

TEST_CASE("dispersion slice is invariant along the flow") {
    const auto u0 = potential_row(ProfileCurve::torus(2.0, 1.0), 32);
    FlowState s{u0, 0.0, 24.0, 1.0};
    const double dt = 0.05 * stability_budget(s);
    (void)integrate(s, dt, 1000, 1000);
    CHECK(max_diff(s.u, u0) > 1e-3);

    const SliceWindow window{{-3.1, 0.0}, {3.1, 0.0}, 63, 1, 8};
    for (double w1 : {0.6, 2.0}) {
        const auto before = dispersion_slice(lift(FlowState{u0, 0.0, 24.0, 1.0}), w1, window);
        const auto after = dispersion_slice(lift(s), w1, window);
        REQUIRE(!before.points.empty());
        REQUIRE(before.points.size() == after.points.size());
        for (std::size_t i = 0; i < before.points.size(); ++i)
            CHECK(std::abs(before.points[i].w2 - after.points[i].w2) < 1e-5);
    }
}
