#pragma once

// Zero-energy Bloch data of the Dirac operator
//   d_z Ψ1 = U Ψ2,  d_zbar Ψ2 = -U Ψ1
// with Ψ(z + 1) = w1 Ψ(z), Ψ(z + τ) = w2 Ψ(z), w1 = e^{i p1}, w2 = e^{i p2 |τ|}.

#include "weiermnv/torus_grid.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace wmnv {

/// Transfer matrix of φ1' = 2Uφ2 - κφ1, φ2' = -2Uφ1 + κφ2 over one x-period
/// (the reduction Ψ_j = e^{iκy} φ_j(x) for potentials depending on x alone).
struct MonodromyData {
    double kappa = 0.0;
    Eigen::Matrix2cd matrix = Eigen::Matrix2cd::Identity();
    /// |eigenvalues[0]| <= |eigenvalues[1]|; candidate values of w1.
    std::array<cplx, 2> eigenvalues{cplx{1.0}, cplx{1.0}};
    int steps = 0;

    /// e^{iκ y_period}.
    cplx w2(double y_period) const;
};

struct MonodromyOptions {
    /// Step doubling stops once two estimates differ by less than tolerance * max(1, |M|).
    double tolerance = 1e-13;
    int min_steps = 32;
    int max_steps = 1 << 18;
};

/// Fourth-order Magnus integration of the reduced system. `u` holds uniform
/// samples over [0, period) and is interpolated trigonometrically.
/// Throws IntegrationFailure or InvalidArgument.
MonodromyData floquet_monodromy(std::span<const double> u, double period, double kappa,
                                const MonodromyOptions &opt = {});

struct BlochEvaluation {
    /// σ_min / σ_max of the truncated operator. In the block-diagonal case σ_max
    /// is that of the block with the largest free diagonal (within 2 l1 of the norm).
    double residual = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    int M = 0;
    /// U depends on t1 only and the operator splits by t2 mode.
    bool block_diagonal = false;
};

struct BlochOptions {
    /// Free diagonal on the truncation edge must exceed this multiple of the
    /// potential's coefficient l1 norm.
    double resolve_factor = 10.0;
    /// Coefficient mass off the t2 = 0 axis below this fraction counts as x-only.
    double axis_tolerance = 1e-10;
    int threads = 0;
};

/// Dirac operator on the twisted basis e^{2πi((m + p1/2π) t1 + (n + p2|τ|/2π) t2)},
/// |m|, |n| <= (M - 1)/2. M must be odd and >= 3.
/// Throws TruncationTooSmall when the truncation edge is not dominated by the free part.
BlochEvaluation bloch_det(const ScalarField &U, cplx p1, cplx p2, int M, const BlochOptions &opt = {});

/// Smallest odd M (>= 5, <= max_M) resolving every listed (p1, p2). Throws TruncationTooSmall.
int choose_truncation(const ScalarField &U, std::span<const std::array<cplx, 2>> points, int max_M = 121,
                      const BlochOptions &opt = {});

struct BlochPoint {
    cplx w1;
    cplx w2;
    cplx p1;
    cplx p2;
    /// p = principal logarithm + 2π branch (p1) or + 2π branch / |τ| (p2).
    int branch1 = 0;
    int branch2 = 0;
    double residual = 0.0;
};

/// Scan rectangle in the p2 plane. samples_im == 1 scans the real segment at Im p2 = p2_lo.imag().
struct SliceWindow {
    cplx p2_lo{-4.0, 0.0};
    cplx p2_hi{4.0, 0.0};
    int samples_re = 401;
    int samples_im = 1;
    int max_count = 32;
};

struct SliceOptions {
    /// 0 picks the truncation automatically.
    int M = 0;
    double threshold = 1e-6;
    double polish_tolerance = 1e-12;
    BlochOptions bloch;
};

struct SliceResult {
    std::vector<BlochPoint> points;
    cplx p1;
    int branch1 = 0;
    int M = 0;
    int nx = 0;
    int ny = 0;
    bool block_diagonal = false;
    /// Local minima rejected for residual above the threshold, and any note.
    std::string diagnostics;
};

/// Roots in p2 of bloch_det at p1 = -i log w1 (principal branch), sorted by
/// (Re p2, Im p2). Points equal up to a period shift of p2 are merged. An empty
/// list is a valid answer and carries diagnostics. Throws InvalidArgument.
SliceResult dispersion_slice(const ScalarField &U, cplx w1, const SliceWindow &window, const SliceOptions &opt = {});

/// λ1 = (πm Re τ - πn)/Im τ + iπm, λ2 = conj(λ1) for |m| <= mmax, |n| <= nmax.
std::vector<std::array<cplx, 2>> resonant_pairs(cplx tau, int mmax, int nmax);

} // namespace wmnv
