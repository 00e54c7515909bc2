#pragma once

// Uniform lattice over the period parallelogram spanned by 1 and tau, complex
// grid functions on it, and the Fourier-multiplier calculus (d/dz, d/dzbar,
// their inverse on zero-mean fields, cell average) everything else builds on.
//
// Coordinates: z = t1 + tau*t2, t1,t2 in [0,1). With z = x + iy,
//   d/dz    = (d/dx - i d/dy)/2 = (conj(tau) d/dt1 - d/dt2) / (conj(tau) - tau)
//   d/dzbar = (d/dx + i d/dy)/2 = (-tau d/dt1 + d/dt2) / (conj(tau) - tau)

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wmnv {

using cplx = std::complex<double>;

class TorusGrid {
public:
    /// Throws NonPositiveImaginaryModulus or BadResolution (nx, ny must be even and >= 4).
    static TorusGrid make(cplx tau, int nx, int ny);

    cplx tau() const noexcept { return tau_; }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

    /// Storage is row-major in (k, j): t2 index slow, t1 index fast.
    std::size_t index(int j, int k) const noexcept {
        return static_cast<std::size_t>(k) * nx_ + static_cast<std::size_t>(j);
    }
    double t1(int j) const noexcept { return static_cast<double>(j) / nx_; }
    double t2(int k) const noexcept { return static_cast<double>(k) / ny_; }
    cplx node(int j, int k) const noexcept { return t1(j) + tau_ * t2(k); }

    friend bool operator==(const TorusGrid &, const TorusGrid &) = default;

private:
    TorusGrid(cplx tau, int nx, int ny) : tau_(tau), nx_(nx), ny_(ny) {}

    cplx tau_;
    int nx_;
    int ny_;
};

/// Logarithmic Bloch multipliers of a quasi-periodic grid function:
/// f(t1+1, t2) = e^{p1} f and f(t1, t2+1) = e^{p2} f.
struct Twist {
    cplx p1{};
    cplx p2{};

    /// Periodic (+1) or antiperiodic (-1) in each direction.
    static Twist from_signs(int mult1, int mult2);
    bool is_zero() const noexcept { return p1 == cplx{} && p2 == cplx{}; }
};

class ScalarField {
public:
    explicit ScalarField(const TorusGrid &grid);
    ScalarField(const TorusGrid &grid, std::vector<cplx> values);

    static ScalarField constant(const TorusGrid &grid, cplx c);

    /// Fills the field from f(t1, t2).
    template <class F>
    static ScalarField sample(const TorusGrid &grid, F &&f) {
        ScalarField out(grid);
        for (int k = 0; k < grid.ny(); ++k)
            for (int j = 0; j < grid.nx(); ++j) out(j, k) = f(grid.t1(j), grid.t2(k));
        return out;
    }

    const TorusGrid &grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const cplx> values() const noexcept { return values_; }
    std::span<cplx> values() noexcept { return values_; }

    cplx &operator()(int j, int k) noexcept { return values_[grid_.index(j, k)]; }
    cplx operator()(int j, int k) const noexcept { return values_[grid_.index(j, k)]; }
    cplx &operator[](std::size_t i) noexcept { return values_[i]; }
    cplx operator[](std::size_t i) const noexcept { return values_[i]; }

    ScalarField &operator+=(const ScalarField &o);
    ScalarField &operator-=(const ScalarField &o);
    /// Pointwise product.
    ScalarField &operator*=(const ScalarField &o);
    ScalarField &operator*=(cplx s);
    ScalarField &operator+=(cplx s);

    ScalarField conj() const;
    ScalarField real_part() const;
    ScalarField abs2() const;
    double max_abs() const;
    double max_abs_imag() const;

private:
    TorusGrid grid_;
    std::vector<cplx> values_;
};

ScalarField operator+(ScalarField a, const ScalarField &b);
ScalarField operator-(ScalarField a, const ScalarField &b);
ScalarField operator*(ScalarField a, const ScalarField &b);
ScalarField operator*(cplx s, ScalarField a);
ScalarField operator-(ScalarField a);

/// Throws GridMismatch when the two fields live on different lattices.
void require_same_grid(const ScalarField &a, const ScalarField &b);

/// Fourier coefficients of a (possibly twisted) field, reusable for several derivatives.
class Spectrum {
public:
    explicit Spectrum(const ScalarField &f, Twist twist = {});

    const TorusGrid &grid() const noexcept { return grid_; }
    Twist twist() const noexcept { return twist_; }
    /// Coefficient of mode (m, n) in FFT bin order.
    std::span<const cplx> coefficients() const noexcept { return coeffs_; }

    /// d^a/dt1^a d^b/dt2^b of the field.
    ScalarField derivative(int order_t1, int order_t2) const;
    ScalarField d_z() const;
    ScalarField d_zbar() const;
    /// Applies an arbitrary symbol array (bin order) and transforms back.
    ScalarField apply(std::span<const cplx> symbol) const;

private:
    ScalarField synthesize(std::vector<cplx> coeffs) const;

    TorusGrid grid_;
    Twist twist_;
    std::vector<cplx> coeffs_;
};

/// Symbols of d/dt1, d/dt2, d/dz, d/dzbar in FFT bin order. The Nyquist bin of
/// each direction carries wavenumber zero.
std::vector<cplx> symbol_t1(const TorusGrid &grid, Twist twist = {});
std::vector<cplx> symbol_t2(const TorusGrid &grid, Twist twist = {});
std::vector<cplx> symbol_z(const TorusGrid &grid, Twist twist = {});
std::vector<cplx> symbol_zbar(const TorusGrid &grid, Twist twist = {});

ScalarField d_t1(const ScalarField &f, Twist twist = {});
ScalarField d_t2(const ScalarField &f, Twist twist = {});
ScalarField d_z(const ScalarField &f, Twist twist = {});
ScalarField d_zbar(const ScalarField &f, Twist twist = {});

/// Zero-mean g with d_z g = f - average(f). Throws NonZeroMeanInput when
/// |average(f)| > tol_mean_rel * max|f|.
ScalarField d_z_inverse(const ScalarField &f, double tol_mean_rel = 1e-10);

/// Cell average <<f>> = integral over [0,1)^2 dt1 dt2.
cplx average(const ScalarField &f);

/// Lattice translation by (dj, dk) nodes: out(j, k) = f(j + dj, k + dk).
ScalarField translate(const ScalarField &f, int dj, int dk);

/// Norm of the Fourier content above half the resolved band in either direction,
/// relative to the total norm. Zero for the zero field.
double spectral_tail_ratio(const ScalarField &f);

} // namespace wmnv
