#include <doctest.h>

#include "weiermnv/errors.hpp"
#include "weiermnv/fft.hpp"
#include "weiermnv/torus_grid.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

using namespace wmnv;
using std::numbers::pi;

namespace {

constexpr cplx I{0.0, 1.0};

double max_diff(const ScalarField &a, const ScalarField &b) { return (a - b).max_abs(); }

// Random band-limited field: modes strictly inside the Nyquist band.
ScalarField random_band_limited(const TorusGrid &g, std::mt19937_64 &rng, int band) {
    std::normal_distribution<double> d;
    std::vector<std::tuple<int, int, cplx>> modes;
    for (int m = -band; m <= band; ++m)
        for (int n = -band; n <= band; ++n)
            modes.emplace_back(m, n, cplx{d(rng), d(rng)} * std::exp(-0.3 * (m * m + n * n)));
    return ScalarField::sample(g, [&](double t1, double t2) {
        cplx v{};
        for (auto [m, n, c] : modes) v += c * std::exp(2.0 * pi * I * (m * t1 + n * t2));
        return v;
    });
}

} // namespace

TEST_CASE("make_grid validates modulus and resolution") {
    const auto g = TorusGrid::make(I, 16, 16);
    CHECK(g.size() == 256);
    CHECK(g.node(0, 0) == cplx{});

    const auto g2 = TorusGrid::make(2.0 * I, 8, 8);
    CHECK(std::abs(g2.node(1, 1) - cplx(1.0 / 8, 0.25)) < 1e-15);

    try {
        (void)TorusGrid::make(-I, 16, 16);
        FAIL("expected NonPositiveImaginaryModulus");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::NonPositiveImaginaryModulus);
    }
    for (auto [nx, ny] : {std::pair{15, 16}, {16, 2}, {2, 2}, {16, 7}}) {
        try {
            (void)TorusGrid::make(I, nx, ny);
            FAIL("expected BadResolution");
        } catch (const Error &e) {
            CHECK(e.code() == ErrorCode::BadResolution);
        }
    }
}

TEST_CASE("d_z of a constant vanishes") {
    const auto g = TorusGrid::make({0.3, 1.2}, 8, 12);
    const auto f = ScalarField::constant(g, {2.5, -1.0});
    CHECK(d_z(f).max_abs() < 1e-14);
    CHECK(d_zbar(f).max_abs() < 1e-14);
}

TEST_CASE("d_z of exp(2 pi i t1) on the square lattice is i*pi times the field") {
    const auto g = TorusGrid::make(I, 16, 16);
    const auto f = ScalarField::sample(g, [](double t1, double) { return std::exp(2.0 * pi * I * t1); });
    CHECK(max_diff(d_z(f), (I * pi) * f) < 1e-12);

    // Independent oracle: centred differences of the closed form in (x, y), z = x + iy.
    const auto fxy = [](double x, double) { return std::exp(2.0 * pi * I * x); };
    const double x0 = 0.3, y0 = 0.7;
    const cplx expect = I * pi * fxy(x0, y0);
    double prev = 1e300;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const cplx fx = (fxy(x0 + h, y0) - fxy(x0 - h, y0)) / (2 * h);
        const cplx fy = (fxy(x0, y0 + h) - fxy(x0, y0 - h)) / (2 * h);
        const double err = std::abs(0.5 * (fx - I * fy) - expect);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("spectral d_z matches finite differences on a sheared lattice") {
    const cplx tau{0.35, 0.9};
    const auto g = TorusGrid::make(tau, 32, 32);
    // Doubly periodic function written in (x, y).
    const auto fxy = [tau](double x, double y) {
        const double t2 = y / tau.imag();
        const double t1 = x - tau.real() * t2;
        return std::exp(std::sin(2 * pi * t1) + 0.5 * I * std::cos(2 * pi * (t1 + t2)));
    };
    const auto f = ScalarField::sample(g, [&](double t1, double t2) {
        const cplx z = t1 + tau * t2;
        return fxy(z.real(), z.imag());
    });
    const auto dz = d_z(f);
    const auto dzb = d_zbar(f);
    const double h = 1e-5;
    for (auto [j, k] : {std::pair{3, 5}, {17, 9}, {30, 28}}) {
        const cplx z = g.node(j, k);
        const double x = z.real(), y = z.imag();
        const cplx fx = (fxy(x + h, y) - fxy(x - h, y)) / (2 * h);
        const cplx fy = (fxy(x, y + h) - fxy(x, y - h)) / (2 * h);
        CHECK(std::abs(dz(j, k) - 0.5 * (fx - I * fy)) < 1e-8);
        CHECK(std::abs(dzb(j, k) - 0.5 * (fx + I * fy)) < 1e-8);
    }
}

TEST_CASE("derivative identities hold for arbitrary fields") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> d;
    for (cplx tau : {I, cplx{0.5, 0.8}, cplx{-1.3, 2.1}}) {
        const auto g = TorusGrid::make(tau, 12, 10);
        std::vector<cplx> v(g.size());
        for (auto &x : v) x = {d(rng), d(rng)};
        const ScalarField f(g, v);

        // d_z + d_zbar = d/dt1
        CHECK(max_diff(d_z(f) + d_zbar(f), d_t1(f)) < 1e-11 * d_t1(f).max_abs());
        // commuting multipliers
        const auto a = d_z(d_zbar(f)), b = d_zbar(d_z(f));
        CHECK(max_diff(a, b) < 1e-12 * a.max_abs());
        // conjugation symmetry
        CHECK(max_diff(d_z(f.conj()), d_zbar(f).conj()) < 1e-12 * d_z(f).max_abs());
        // the derivative kills the mean
        CHECK(std::abs(average(d_z(f))) < 1e-12 * d_z(f).max_abs());
    }
}

TEST_CASE("product rule converges spectrally") {
    const cplx tau{0.2, 1.1};
    double prev = 1.0;
    for (int n : {8, 16, 32, 64}) {
        const auto g = TorusGrid::make(tau, n, n);
        const auto f = ScalarField::sample(g, [](double t1, double t2) {
            return std::exp(0.7 * std::cos(2 * pi * t1) + I * std::sin(2 * pi * t2));
        });
        const auto h = ScalarField::sample(g, [](double t1, double t2) {
            return 1.0 / (2.0 + std::sin(2 * pi * (t1 - t2)));
        });
        const double err = max_diff(d_z(f * h), f * d_z(h) + h * d_z(f));
        if (n > 8) CHECK(err < prev / 10);
        prev = err;
    }
    CHECK(prev < 1e-9);
}

TEST_CASE("d_z_inverse inverts d_z on zero-mean fields") {
    std::mt19937_64 rng(11);
    const auto g = TorusGrid::make({0.1, 0.9}, 16, 16);
    const auto f = random_band_limited(g, rng, 5);
    const auto back = d_z_inverse(d_z(f));
    auto expect = f;
    expect += -average(f);
    CHECK(max_diff(back, expect) < 1e-12 * f.max_abs());
    CHECK(std::abs(average(back)) < 1e-14);

    CHECK(d_z_inverse(ScalarField(g)).max_abs() == 0.0);

    try {
        (void)d_z_inverse(ScalarField::constant(g, 1.0));
        FAIL("expected NonZeroMeanInput");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::NonZeroMeanInput);
    }
}

TEST_CASE("average: constants, orthogonality, translation invariance") {
    const auto g = TorusGrid::make(I, 16, 8);
    CHECK(std::abs(average(ScalarField::constant(g, {3.0, -2.0})) - cplx(3.0, -2.0)) < 1e-15);
    const auto e1 = ScalarField::sample(g, [](double t1, double) { return std::exp(2 * pi * I * t1); });
    CHECK(std::abs(average(e1)) < 1e-15);

    std::mt19937_64 rng(3);
    const auto f = random_band_limited(g, rng, 3);
    for (auto [dj, dk] : {std::pair{1, 0}, {5, 3}, {-2, 7}})
        CHECK(std::abs(average(translate(f, dj, dk)) - average(f)) < 1e-14);
}

TEST_CASE("twisted derivatives act on Bloch exponentials exactly") {
    const cplx tau{0.25, 1.3};
    const auto g = TorusGrid::make(tau, 8, 8);
    const cplx lambda{0.7, 0.3};
    const Twist tw{lambda, lambda * std::conj(tau)};
    const auto f = ScalarField::sample(g, [&](double t1, double t2) {
        return std::exp(lambda * std::conj(t1 + tau * t2));
    });
    CHECK(d_z(f, tw).max_abs() < 1e-13);
    CHECK(max_diff(d_zbar(f, tw), lambda * f) < 1e-13);

    // Antiperiodic fields use half-integer wavenumbers.
    const auto h = ScalarField::sample(g, [](double t1, double) { return std::exp(pi * I * t1); });
    CHECK(max_diff(d_t1(h, Twist::from_signs(-1, 1)), (pi * I) * h) < 1e-13);
}

TEST_CASE("spectral tail ratio flags unresolved content") {
    const auto g = TorusGrid::make(I, 16, 16);
    const auto smooth = ScalarField::sample(g, [](double t1, double) { return std::cos(2 * pi * t1); });
    const auto rough = ScalarField::sample(g, [](double t1, double) { return std::cos(2 * pi * 6 * t1); });
    CHECK(spectral_tail_ratio(smooth) < 1e-14);
    CHECK(spectral_tail_ratio(rough) > 0.9);
    CHECK(spectral_tail_ratio(ScalarField(g)) == 0.0);
}
