#include <doctest.h>

#include "weiermnv/bloch.hpp"
#include "weiermnv/conformal.hpp"
#include "weiermnv/errors.hpp"

#include <cmath>
#include <numbers>

using namespace wmnv;
using std::numbers::pi;

namespace {

constexpr cplx I{0.0, 1.0};

std::vector<double> first_row(const ScalarField &U) {
    std::vector<double> row(U.grid().nx());
    for (int j = 0; j < U.grid().nx(); ++j) row[j] = U(j, 0).real();
    return row;
}

ScalarField torus_potential(double R, int n) {
    return extract_potential(revolve(ProfileCurve::torus(R, 1.0), n, n), 1e-4);
}

double bloch_residual(const ScalarField &U, cplx p1, cplx p2) {
    const std::array<cplx, 2> pt{p1, p2};
    return bloch_det(U, p1, p2, choose_truncation(U, std::span(&pt, 1))).residual;
}

} // namespace

TEST_CASE("monodromy of the zero potential") {
    const std::vector<double> zero(16, 0.0);
    const auto id = floquet_monodromy(zero, 1.0, 0.0);
    CHECK((id.matrix - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(id.eigenvalues[0] - 1.0) < 1e-14);
    CHECK(std::abs(id.eigenvalues[1] - 1.0) < 1e-14);

    for (double kappa : {0.7, -1.3, 3.0}) {
        const double L = 1.7;
        const auto m = floquet_monodromy(zero, L, kappa);
        const double a = std::exp(-std::abs(kappa) * L), b = std::exp(std::abs(kappa) * L);
        CHECK(std::abs(m.eigenvalues[0] - a) < 1e-12 * b);
        CHECK(std::abs(m.eigenvalues[1] - b) < 1e-12 * b);
        CHECK(std::abs(m.matrix(0, 0) - std::exp(-kappa * L)) < 1e-12 * b);
        CHECK(std::abs(m.w2(2.0) - std::exp(I * kappa * 2.0)) < 1e-15);
    }
}

TEST_CASE("monodromy has unit determinant") {
    const auto U = torus_potential(2.0, 32);
    const auto row = first_row(U);
    for (double kappa : {0.0, 0.4, 1.9, -2.6}) {
        const auto m = floquet_monodromy(row, 1.0, kappa);
        CHECK(std::abs(m.matrix.determinant() - 1.0) < 1e-10);
        CHECK(std::abs(m.eigenvalues[0] * m.eigenvalues[1] - 1.0) < 1e-10);
    }
    std::vector<double> wiggle(24);
    for (int j = 0; j < 24; ++j) wiggle[j] = 1.5 * std::sin(2 * pi * j / 24.0) + 0.4 * std::cos(6 * pi * j / 24.0) - 0.2;
    CHECK(std::abs(floquet_monodromy(wiggle, 2.5, 0.8).matrix.determinant() - 1.0) < 1e-10);

    MonodromyOptions tight;
    tight.min_steps = 4;
    tight.max_steps = 8;
    CHECK_THROWS_AS((void)floquet_monodromy(row, 1.0, 1.0, tight), Error);
    CHECK_THROWS_AS((void)floquet_monodromy(std::vector<double>{1.0}, 1.0, 0.0), Error);
}

TEST_CASE("free operator vanishes on the two spheres") {
    const auto g = TorusGrid::make({0.0, 1.3}, 8, 8);
    const ScalarField zero(g);
    const double l0 = 0.4;
    // Ψ2 = e^{λ z}: w1 = e^λ, w2 = e^{λτ}; Ψ1 = e^{λ zbar}: w2 = e^{λ taubar}.
    CHECK(bloch_det(zero, -I * l0, l0, 5).residual < 1e-10);
    CHECK(bloch_det(zero, -I * l0, -l0, 5).residual < 1e-10);
    const cplx lam{0.3, 0.5};
    const auto p2_of = [&](cplx w2) { return -I * std::log(w2) / std::abs(g.tau()); };
    CHECK(bloch_det(zero, -I * lam, p2_of(std::exp(lam * g.tau())), 7).residual < 1e-10);
    CHECK(bloch_det(zero, -I * lam, p2_of(std::exp(lam * std::conj(g.tau()))), 7).residual < 1e-10);
    CHECK(bloch_det(zero, -I * l0, l0 + 0.9, 5).residual > 1e-3);

    CHECK_THROWS_AS((void)bloch_det(zero, 0.0, 0.3, 4), Error);
}

TEST_CASE("truncation must dominate the potential") {
    const auto g = TorusGrid::make({0.0, 1.0}, 16, 16);
    const auto U = ScalarField::sample(g, [](double t1, double) { return cplx(3.0 + std::cos(2 * pi * t1)); });
    try {
        (void)bloch_det(U, 0.1, 0.2, 5);
        FAIL("expected TruncationTooSmall");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::TruncationTooSmall);
    }
    const std::array<cplx, 2> pt{0.1, 0.2};
    const int M = choose_truncation(U, std::span(&pt, 1));
    CHECK(M % 2 == 1);
    CHECK_NOTHROW((void)bloch_det(U, 0.1, 0.2, M));
    CHECK_THROWS_AS((void)choose_truncation(U, std::span(&pt, 1), 7), Error);
}

TEST_CASE("monodromy multipliers are roots of the truncated operator") {
    for (double R : {std::sqrt(2.0), 2.0, 3.0}) {
        const auto U = torus_potential(R, 32);
        const auto row = first_row(U);
        CAPTURE(R);
        for (double kappa : {0.35, 1.7}) {
            const auto mono = floquet_monodromy(row, 1.0, kappa);
            for (const cplx mu : mono.eigenvalues) {
                const cplx p1 = -I * std::log(mu);
                CHECK(bloch_residual(U, p1, kappa) < 1e-10);
                CHECK(bloch_residual(U, p1, kappa + 1e-2) > 1e-8);
            }
            const auto s = dispersion_slice(U, mono.eigenvalues[1], {{kappa - 0.2, 0.0}, {kappa + 0.2, 0.0}, 21, 1, 8});
            REQUIRE(!s.points.empty());
            double best = 1e300;
            for (const auto &p : s.points) best = std::min(best, std::abs(p.p2 - kappa));
            CHECK(best < 1e-6);
            CHECK(s.block_diagonal);
        }
    }
}

TEST_CASE("dense and block-diagonal assemblies agree") {
    const auto g = TorusGrid::make({0.2, 1.1}, 16, 16);
    const auto U = ScalarField::sample(g, [](double t1, double) { return cplx(0.3 + 0.2 * std::cos(2 * pi * t1)); });
    BlochOptions dense;
    dense.axis_tolerance = -1.0;
    for (cplx p2 : {cplx(0.3), cplx(1.1, 0.2), cplx(-0.7, -0.4)}) {
        const cplx p1{0.4, -0.3};
        const std::array<cplx, 2> pt{p1, p2};
        const int M = choose_truncation(U, std::span(&pt, 1));
        const auto a = bloch_det(U, p1, p2, M);
        const auto b = bloch_det(U, p1, p2, M, dense);
        CHECK(a.block_diagonal);
        CHECK(!b.block_diagonal);
        CHECK(std::abs(a.sigma_min - b.sigma_min) < 1e-12 * b.sigma_max);
    }
}

TEST_CASE("slices of the free operator") {
    const auto g = TorusGrid::make({0.0, 1.3}, 8, 8);
    const ScalarField zero(g);
    const double l0 = 0.4;
    const auto s = dispersion_slice(zero, std::exp(cplx(l0)), {{-1.5, 0.0}, {1.5, 0.0}, 61, 1, 8});
    REQUIRE(s.points.size() == 2);
    CHECK(std::abs(s.points[0].w2 - std::exp(l0 * std::conj(g.tau()))) < 1e-10);
    CHECK(std::abs(s.points[1].w2 - std::exp(l0 * g.tau())) < 1e-10);
    for (const auto &p : s.points) CHECK(p.residual < 1e-10);

    const auto none = dispersion_slice(zero, std::exp(cplx(l0)), {{0.6, 0.0}, {1.2, 0.0}, 21, 1, 8});
    CHECK(none.points.empty());
    CHECK(none.diagnostics.find("no roots") != std::string::npos);

    // Complex root λ = 0.4 + 0.3i on the holomorphic sheet: p2 = λ when τ is imaginary.
    const cplx lam{0.4, 0.3};
    const auto c = dispersion_slice(zero, std::exp(lam), {{0.1, 0.05}, {0.7, 0.55}, 13, 11, 8});
    REQUIRE(c.points.size() == 1);
    CHECK(std::abs(c.points[0].p2 - lam) < 1e-9);
    CHECK(std::abs(c.points[0].w2 - std::exp(lam * g.tau())) < 1e-9);

    CHECK_THROWS_AS((void)dispersion_slice(zero, 0.0, {}), Error);
    CHECK_THROWS_AS((void)dispersion_slice(zero, 1.0, {{1.0, 0.0}, {0.0, 0.0}, 21, 1, 4}), Error);
}

TEST_CASE("slice points close under both involutions") {
    const auto U = torus_potential(2.0, 32);
    for (double w1 : {0.6, 2.0}) {
        const auto s = dispersion_slice(U, w1, {{-1.8, 0.0}, {1.8, 0.0}, 37, 1, 8});
        REQUIRE(!s.points.empty());
        for (const auto &p : s.points) {
            CAPTURE(p.p2);
            CHECK(p.residual < 1e-6);
            CHECK(bloch_residual(U, -p.p1, -p.p2) < 1e-6);
            CHECK(bloch_residual(U, -std::conj(p.p1), -std::conj(p.p2)) < 1e-6);
            CHECK(std::abs(p.w2 - std::exp(I * p.p2 * std::abs(U.grid().tau()))) < 1e-12);
        }
    }
}

TEST_CASE("resonant pairs") {
    const auto r = resonant_pairs(I, 0, 0);
    REQUIRE(r.size() == 1);
    CHECK(std::abs(r[0][0]) == 0.0);
    for (const auto &pr : resonant_pairs(I, 1, 0))
        if (pr[0].imag() > 0) CHECK(std::abs(pr[0] - I * pi) < 1e-15);
    const cplx tau{0.3, 1.2};
    for (const auto &[l1, l2] : resonant_pairs(tau, 3, 4)) {
        CHECK(std::abs(std::exp(l1 - l2) - 1.0) < 1e-12);
        CHECK(std::abs(std::exp(l1 * std::conj(tau) - l2 * tau) - 1.0) < 1e-12);
    }
    CHECK(resonant_pairs(tau, 3, 4).size() == 63);
    CHECK_THROWS_AS((void)resonant_pairs({0.5, 0.0}, 1, 1), Error);
}
