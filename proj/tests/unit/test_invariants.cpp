#include <doctest.h>

#include "weiermnv/errors.hpp"
#include "weiermnv/invariants.hpp"

#include <cmath>
#include <functional>
#include <numbers>

using namespace wmnv;
using std::numbers::pi;

namespace {

constexpr cplx I{0.0, 1.0};

struct Potential {
    cplx tau;
    std::function<double(double, double)> u;
};

std::vector<Potential> smooth_potentials() {
    return {
        {I, [](double t1, double) { return 0.7 + 0.4 * std::cos(2 * pi * t1); }},
        {{0.0, 1.7}, [](double t1, double t2) { return 0.5 + 0.3 * std::cos(2 * pi * t1) + 0.2 * std::sin(2 * pi * (t1 + t2)); }},
        {{0.3, 0.9}, [](double t1, double t2) { return std::exp(0.5 * std::sin(2 * pi * t1) - 0.3 * std::cos(2 * pi * t2)); }},
        {{-0.4, 1.2}, [](double t1, double t2) { return 1.0 / (2.0 + std::cos(2 * pi * (t1 - 2 * t2))) - 0.2 * std::sin(2 * pi * t2); }},
        {{0.0, 2.3}, [](double t1, double) { return (2.0 + 2.0 * std::cos(2 * pi * t1)) / (2.0 + std::cos(2 * pi * t1)); }},
        {{0.5, 0.8}, [](double t1, double t2) { return 0.1 * std::cos(2 * pi * (t1 + t2)) * std::sin(2 * pi * t2) + 0.05; }},
    };
}

ScalarField sample(const Potential &p, int n) {
    return ScalarField::sample(TorusGrid::make(p.tau, n, n), [&](double t1, double t2) { return cplx(p.u(t1, t2)); });
}

} // namespace

TEST_CASE("recursion on constant potentials") {
    const auto g = TorusGrid::make(I, 8, 8);
    const auto zero = mnv_recursion(ScalarField(g), 5);
    for (int k = 1; k <= 5; ++k) CHECK(zero.invariants[k] == cplx{});
    for (const auto &f : zero.jets.phi) CHECK(f.max_abs() == 0.0);
    for (const auto &f : zero.jets.chi) CHECK(f.max_abs() == 0.0);

    const double c = 1.3;
    const auto r = mnv_recursion(ScalarField::constant(g, c), 3);
    CHECK(std::abs(r.invariants[1] + c * c) < 1e-14);
    CHECK(std::abs(r.invariants[2]) < 1e-14);
    CHECK(std::abs(r.invariants[3]) < 1e-14);
    CHECK(r.jets.phi[0].max_abs() < 1e-14);
    CHECK(r.jets.phi[1].max_abs() < 1e-14);
    CHECK(r.jets.chi[1].max_abs() < 1e-14);
    CHECK(r.jets.chi[2].max_abs() < 1e-14);
    CHECK((r.jets.chi[0] + ScalarField::constant(g, c)).max_abs() == 0.0);
    CHECK(std::abs(h1_direct(ScalarField::constant(g, c)) + c * c) < 1e-14);
    CHECK(std::abs(h3_direct(ScalarField::constant(g, c))) < 1e-14);
}

TEST_CASE("h1 of cos(2 pi t1) is -1/2") {
    const auto g = TorusGrid::make(I, 16, 16);
    const auto u = ScalarField::sample(g, [](double t1, double) { return std::cos(2 * pi * t1); });
    CHECK(std::abs(h1_direct(u) + 0.5) < 1e-15);
    CHECK(std::abs(mnv_recursion(u, 1).invariants[1] + 0.5) < 1e-15);
}

TEST_CASE("even coefficients vanish and closed forms match the recursion") {
    for (const auto &p : smooth_potentials()) {
        const auto u = sample(p, 64);
        const auto r = mnv_recursion(u, 6);
        const auto &h = r.invariants;
        CAPTURE(h[1]);
        CHECK(h.even_residual < 1e-8 * std::max(std::abs(h[1]), 1.0));
        CHECK(std::abs(h[1] - h1_direct(u)) < 1e-12);
        const cplx h3 = h3_direct(u);
        CHECK(std::abs(h[3] - h3) < 1e-9 * std::max(std::abs(h3), 1e-300));
    }
}

TEST_CASE("h3 of a one-dimensional potential matches the reduced formula") {
    // U(x), x = t1 on a rectangular lattice: d_zbar = d_x / 2, so
    // h3 = <<U_x^2 / 4 - (U^2 + h1)^2>>.
    for (double c : {0.7, 1.0, 2.5}) {
        const auto g = TorusGrid::make({0.0, c}, 64, 8);
        const auto uf = [](double x) { return 0.6 + 0.5 * std::cos(2 * pi * x) + 0.2 * std::sin(4 * pi * x); };
        const auto ux = [](double x) { return -pi * std::sin(2 * pi * x) + 0.8 * pi * std::cos(4 * pi * x); };
        const int n = 2000;
        double m2 = 0.0;
        for (int i = 0; i < n; ++i) m2 += std::pow(uf(double(i) / n), 2) / n;
        double oracle = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = double(i) / n;
            oracle += (0.25 * ux(x) * ux(x) - std::pow(uf(x) * uf(x) - m2, 2)) / n;
        }
        const auto u = ScalarField::sample(g, [&](double t1, double) { return cplx(uf(t1)); });
        CHECK(std::abs(h3_direct(u) - oracle) < 1e-11 * std::abs(oracle));
        CHECK(std::abs(mnv_recursion(u, 3).invariants[3] - oracle) < 1e-11 * std::abs(oracle));
    }
}

TEST_CASE("invariants do not depend on the normalization of the jets") {
    const auto u = sample(smooth_potentials()[2], 48);
    const int K = 5;
    const auto r = mnv_recursion(u, K);
    const std::vector<cplx> alpha{{0.3, -0.2}, {1.1, 0.4}, {-0.7, 0.0}, {0.2, 2.0}, {0.5, 0.5}};
    // Multiply the formal solution by 1 + α_1/λ + α_2/λ^2 + ...
    std::vector<ScalarField> phi, chi;
    const ScalarField one = ScalarField::constant(u.grid(), 1.0);
    for (int k = 1; k <= K; ++k) {
        ScalarField p = r.jets.phi[k - 1], c = r.jets.chi[k - 1];
        for (int j = 1; j <= k; ++j) {
            p += alpha[j - 1] * (k - j == 0 ? one : r.jets.phi[k - j - 1]);
            if (k - j >= 1) c += alpha[j - 1] * r.jets.chi[k - j - 1];
        }
        phi.push_back(p);
        chi.push_back(c);
    }
    std::vector<cplx> h;
    for (int k = 1; k <= K; ++k) {
        ScalarField rhs = u * chi[k - 1];
        for (int j = 1; j < k; ++j) rhs -= h[j - 1] * phi[k - j - 1];
        h.push_back(average(rhs));
        CHECK(std::abs(h.back() - r.invariants[k]) < 1e-10 * std::max(1.0, std::abs(r.invariants[k])));
    }
}

TEST_CASE("invariants are translation invariant and converge with resolution") {
    const auto p = smooth_potentials()[3];
    const auto u = sample(p, 64);
    const auto base = mnv_recursion(u, 5).invariants;
    for (auto [dj, dk] : {std::pair{1, 0}, {7, 3}, {-5, 20}}) {
        const auto moved = mnv_recursion(translate(u, dj, dk), 5).invariants;
        for (int k = 1; k <= 5; ++k) CHECK(std::abs(moved[k] - base[k]) < 1e-13 * std::max(1.0, std::abs(base[k])));
    }
    double prev = 1.0;
    for (int n : {16, 32, 64}) {
        const auto a = mnv_recursion(sample(p, n), 5).invariants;
        const auto b = mnv_recursion(sample(p, 2 * n), 5).invariants;
        const double d = std::abs(a[5] - b[5]);
        if (n > 16 && prev > 1e-11) CHECK(d < prev / 10);
        prev = d;
    }
    CHECK(prev < 1e-10);
}

TEST_CASE("recursion input validation and resolution warning") {
    const auto g = TorusGrid::make(I, 16, 16);
    auto u = ScalarField::sample(g, [](double t1, double) { return cplx(std::cos(2 * pi * t1), 0.1); });
    try {
        (void)mnv_recursion(u, 3);
        FAIL("expected NonRealPotential");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::NonRealPotential);
    }
    CHECK_THROWS_AS((void)h3_direct(u), Error);
    CHECK_THROWS_AS((void)mnv_recursion(u.real_part(), 0), Error);

    const auto rough = ScalarField::sample(g, [](double t1, double t2) {
        return 1.0 / (1.05 + std::cos(2 * pi * t1)) + std::sin(2 * pi * t2);
    });
    CHECK(mnv_recursion(rough, 5).invariants.resolution_warning);
    CHECK(!mnv_recursion(sample(smooth_potentials()[0], 64), 6).invariants.resolution_warning);
}
