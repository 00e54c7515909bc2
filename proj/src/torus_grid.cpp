#include "weiermnv/torus_grid.hpp"

#include "weiermnv/errors.hpp"
#include "weiermnv/fft.hpp"
#include "weiermnv/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace wmnv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wavenumber 2π·freq, with the Nyquist bin mapped to zero.
double wavenumber(int bin, int n) {
    if (2 * bin == n) return 0.0;
    return kTwoPi * fft::frequency(bin, n);
}

// e^{sign (p1 t1 + p2 t2)} per node.
std::vector<cplx> twist_phase(const TorusGrid &g, Twist tw, double sign) {
    std::vector<cplx> phase(g.size());
    for (int k = 0; k < g.ny(); ++k)
        for (int j = 0; j < g.nx(); ++j)
            phase[g.index(j, k)] = std::exp(sign * (tw.p1 * g.t1(j) + tw.p2 * g.t2(k)));
    return phase;
}

} // namespace

TorusGrid TorusGrid::make(cplx tau, int nx, int ny) {
    if (!(tau.imag() > 0.0)) {
        std::ostringstream msg;
        msg << "Im(tau) must be positive, got tau = " << tau;
        throw Error(ErrorCode::NonPositiveImaginaryModulus, msg.str());
    }
    if (nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0) {
        std::ostringstream msg;
        msg << "nx, ny must be even and >= 4, got " << nx << "x" << ny;
        throw Error(ErrorCode::BadResolution, msg.str());
    }
    return TorusGrid(tau, nx, ny);
}

Twist Twist::from_signs(int mult1, int mult2) {
    const cplx half_turn{0.0, std::numbers::pi};
    return {mult1 < 0 ? half_turn : cplx{}, mult2 < 0 ? half_turn : cplx{}};
}

ScalarField::ScalarField(const TorusGrid &grid) : grid_(grid), values_(grid.size()) {}

ScalarField::ScalarField(const TorusGrid &grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw Error(ErrorCode::GridMismatch, "value count does not match nx*ny");
}

ScalarField ScalarField::constant(const TorusGrid &grid, cplx c) {
    return ScalarField(grid, std::vector<cplx>(grid.size(), c));
}

void require_same_grid(const ScalarField &a, const ScalarField &b) {
    if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

ScalarField &ScalarField::operator+=(const ScalarField &o) {
    require_same_grid(*this, o);
    kernels::axpy(1.0, o.values_, values_);
    return *this;
}

ScalarField &ScalarField::operator-=(const ScalarField &o) {
    require_same_grid(*this, o);
    kernels::axpy(-1.0, o.values_, values_);
    return *this;
}

ScalarField &ScalarField::operator*=(const ScalarField &o) {
    require_same_grid(*this, o);
    kernels::mul(values_, o.values_, values_);
    return *this;
}

ScalarField &ScalarField::operator*=(cplx s) {
    for (auto &v : values_) v *= s;
    return *this;
}

ScalarField &ScalarField::operator+=(cplx s) {
    for (auto &v : values_) v += s;
    return *this;
}

ScalarField ScalarField::conj() const {
    ScalarField out(*this);
    for (auto &v : out.values_) v = std::conj(v);
    return out;
}

ScalarField ScalarField::real_part() const {
    ScalarField out(*this);
    for (auto &v : out.values_) v = v.real();
    return out;
}

ScalarField ScalarField::abs2() const {
    ScalarField out(*this);
    for (auto &v : out.values_) v = std::norm(v);
    return out;
}

double ScalarField::max_abs() const { return kernels::max_abs(values_); }

double ScalarField::max_abs_imag() const {
    double m = 0.0;
    for (const auto &v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
}

ScalarField operator+(ScalarField a, const ScalarField &b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField &b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField &b) { return a *= b; }
ScalarField operator*(cplx s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

std::vector<cplx> symbol_t1(const TorusGrid &g, Twist tw) {
    std::vector<cplx> s(g.size());
    for (int k = 0; k < g.ny(); ++k)
        for (int j = 0; j < g.nx(); ++j) s[g.index(j, k)] = cplx{0.0, wavenumber(j, g.nx())} + tw.p1;
    return s;
}

std::vector<cplx> symbol_t2(const TorusGrid &g, Twist tw) {
    std::vector<cplx> s(g.size());
    for (int k = 0; k < g.ny(); ++k)
        for (int j = 0; j < g.nx(); ++j) s[g.index(j, k)] = cplx{0.0, wavenumber(k, g.ny())} + tw.p2;
    return s;
}

std::vector<cplx> symbol_z(const TorusGrid &g, Twist tw) {
    const cplx tau = g.tau();
    const cplx tb = std::conj(tau);
    const cplx inv = 1.0 / (tb - tau);
    auto s1 = symbol_t1(g, tw);
    const auto s2 = symbol_t2(g, tw);
    for (std::size_t i = 0; i < s1.size(); ++i) s1[i] = (tb * s1[i] - s2[i]) * inv;
    return s1;
}

std::vector<cplx> symbol_zbar(const TorusGrid &g, Twist tw) {
    const cplx tau = g.tau();
    const cplx inv = 1.0 / (std::conj(tau) - tau);
    auto s1 = symbol_t1(g, tw);
    const auto s2 = symbol_t2(g, tw);
    for (std::size_t i = 0; i < s1.size(); ++i) s1[i] = (-tau * s1[i] + s2[i]) * inv;
    return s1;
}

Spectrum::Spectrum(const ScalarField &f, Twist twist)
    : grid_(f.grid()), twist_(twist), coeffs_(f.size()) {
    if (twist.is_zero()) {
        fft::forward_2d(grid_.ny(), grid_.nx(), f.values(), coeffs_);
    } else {
        std::vector<cplx> periodic(f.size());
        kernels::mul(f.values(), twist_phase(grid_, twist, -1.0), periodic);
        fft::forward_2d(grid_.ny(), grid_.nx(), periodic, coeffs_);
    }
}

ScalarField Spectrum::synthesize(std::vector<cplx> coeffs) const {
    ScalarField out(grid_);
    fft::inverse_2d(grid_.ny(), grid_.nx(), coeffs, out.values());
    if (!twist_.is_zero()) kernels::mul(out.values(), twist_phase(grid_, twist_, 1.0), out.values());
    return out;
}

ScalarField Spectrum::apply(std::span<const cplx> symbol) const {
    std::vector<cplx> c(coeffs_.size());
    kernels::mul(coeffs_, symbol, c);
    return synthesize(std::move(c));
}

ScalarField Spectrum::derivative(int order_t1, int order_t2) const {
    std::vector<cplx> symbol(coeffs_.size(), cplx{1.0});
    if (order_t1 > 0) {
        const auto s1 = symbol_t1(grid_, twist_);
        for (std::size_t i = 0; i < symbol.size(); ++i) symbol[i] *= std::pow(s1[i], order_t1);
    }
    if (order_t2 > 0) {
        const auto s2 = symbol_t2(grid_, twist_);
        for (std::size_t i = 0; i < symbol.size(); ++i) symbol[i] *= std::pow(s2[i], order_t2);
    }
    return apply(symbol);
}

ScalarField Spectrum::d_z() const { return apply(symbol_z(grid_, twist_)); }
ScalarField Spectrum::d_zbar() const { return apply(symbol_zbar(grid_, twist_)); }

ScalarField d_t1(const ScalarField &f, Twist twist) { return Spectrum(f, twist).derivative(1, 0); }
ScalarField d_t2(const ScalarField &f, Twist twist) { return Spectrum(f, twist).derivative(0, 1); }
ScalarField d_z(const ScalarField &f, Twist twist) { return Spectrum(f, twist).d_z(); }
ScalarField d_zbar(const ScalarField &f, Twist twist) { return Spectrum(f, twist).d_zbar(); }

cplx average(const ScalarField &f) {
    return kernels::sum(f.values()) / static_cast<double>(f.size());
}

ScalarField d_z_inverse(const ScalarField &f, double tol_mean_rel) {
    const cplx mean = average(f);
    const double scale = f.max_abs();
    if (std::abs(mean) > tol_mean_rel * scale) {
        std::ostringstream msg;
        msg << "|average| = " << std::abs(mean) << " exceeds " << tol_mean_rel << " * max|f| = "
            << tol_mean_rel * scale;
        throw Error(ErrorCode::NonZeroMeanInput, msg.str());
    }
    const Spectrum spec(f);
    auto symbol = symbol_z(f.grid());
    for (auto &s : symbol) s = (s == cplx{}) ? cplx{} : 1.0 / s;
    return spec.apply(symbol);
}

ScalarField translate(const ScalarField &f, int dj, int dk) {
    const TorusGrid &g = f.grid();
    ScalarField out(g);
    const auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
    for (int k = 0; k < g.ny(); ++k)
        for (int j = 0; j < g.nx(); ++j) out(j, k) = f(wrap(j + dj, g.nx()), wrap(k + dk, g.ny()));
    return out;
}

double spectral_tail_ratio(const ScalarField &f) {
    const TorusGrid &g = f.grid();
    const Spectrum spec(f);
    const auto c = spec.coefficients();
    double total = 0.0, tail = 0.0;
    for (int k = 0; k < g.ny(); ++k) {
        const int n = std::abs(fft::frequency(k, g.ny()));
        for (int j = 0; j < g.nx(); ++j) {
            const int m = std::abs(fft::frequency(j, g.nx()));
            const double e = std::norm(c[g.index(j, k)]);
            total += e;
            if (4 * m > g.nx() || 4 * n > g.ny()) tail += e;
        }
    }
    return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

} // namespace wmnv
