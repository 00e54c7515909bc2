#pragma once

// Conserved functionals h_1, h_2, h_3, ... of the Dirac potential U, from the
// formal Bloch solution (1 + φ_1/λ + ..., χ_1/λ + ...) e^{λ z + h(λ) zbar}:
//   χ_1 = -U,  χ_k = -d_zbar χ_{k-1} - U φ_{k-1},
//   d_z φ_k = U χ_k - h_k - Σ_{j<k} h_j φ_{k-j},
// where h_k is the value that makes the right-hand side mean-free and each φ_k
// is taken with zero cell mean.

#include "weiermnv/torus_grid.hpp"

#include <vector>

namespace wmnv {

struct JetCoefficients {
    std::vector<ScalarField> phi; // φ_1..φ_K
    std::vector<ScalarField> chi; // χ_1..χ_K
};

struct InvariantVector {
    std::vector<cplx> h; // h_1..h_K, index 0 holds h_1
    double even_residual = 0.0;
    int nx = 0;
    int ny = 0;
    cplx tau{};
    /// Spectral tail ratio of φ_K; above 1e-8 the resolution is flagged as insufficient.
    double tail_ratio = 0.0;
    bool resolution_warning = false;

    /// h_k with 1-based k.
    cplx operator[](int k) const { return h.at(static_cast<std::size_t>(k - 1)); }
};

struct MnvResult {
    JetCoefficients jets;
    InvariantVector invariants;
};

/// Throws NonRealPotential when max|Im U| > tol * max|U|.
void require_real_potential(const ScalarField &U, double tol = 1e-10);

/// Throws NonRealPotential or InvalidArgument (K < 1).
MnvResult mnv_recursion(const ScalarField &U, int K);

/// -<<U^2>>.
cplx h1_direct(const ScalarField &U);

/// -<<U U_zbarzbar + (U^2 + h_1) d_zbar V_1>> with V_1 = d_z^{-1}(U^2 + h_1).
cplx h3_direct(const ScalarField &U);

} // namespace wmnv
