#pragma once

// Zero-energy Dirac system  d/dz Ψ1 = U Ψ2,  d/dzbar Ψ2 = -U Ψ1  and the
// immersion it integrates to. With W = X1 - i X2:
//   W_z = i Ψ2^2,  W_zbar = -i Ψ1^2,  (X3)_z = -Ψ2 conj(Ψ1),
// so e^α = |Ψ1|^2 + |Ψ2|^2 and U = H e^α / 2 for the normal X_x × X_y.

#include "weiermnv/immersion.hpp"
#include "weiermnv/torus_grid.hpp"

namespace wmnv {

struct SpinorField {
    ScalarField psi1;
    ScalarField psi2;
    /// Ψ(t1 + 1) = mult1 Ψ, Ψ(t2 + 1) = mult2 Ψ; each is +1 or -1.
    int mult1 = 1;
    int mult2 = 1;

    SpinorField(ScalarField p1, ScalarField p2, int m1 = 1, int m2 = 1);

    const TorusGrid &grid() const noexcept { return psi1.grid(); }
    Twist twist() const { return Twist::from_signs(mult1, mult2); }
    /// |Ψ1|^2 + |Ψ2|^2, the conformal factor of the image.
    ScalarField density() const;
};

struct WeierstrassData {
    ScalarField U;
    SpinorField spinor;
    Vec3 constants = Vec3::Zero();
    /// Node (j, k) where the image equals `constants`.
    int base_j = 0;
    int base_k = 0;
};

struct WeierstrassOptions {
    double dirac_tolerance = 1e-6;
    /// Allowed |period| relative to the mean conformal factor.
    double period_tolerance = 1e-6;
    /// Keep the linear part instead of failing with NonPeriodicImage.
    bool allow_nonperiodic = false;
};

/// max_node(|Ψ1_z - UΨ2| + |Ψ2_zbar + UΨ1|) divided by the largest first
/// derivative or potential term of the spinor (or by max|Ψ| when all vanish).
double dirac_residual(const ScalarField &U, const SpinorField &s);
double dirac_residual(const ScalarField &U, const ScalarField &psi1, const ScalarField &psi2, Twist twist);

/// Periodic part of the image plus the period vectors along t1 and t2.
struct WeierstrassImage {
    std::vector<Vec3> periodic;
    Vec3 period_t1 = Vec3::Zero();
    Vec3 period_t2 = Vec3::Zero();
    double relative_period = 0.0;
};

/// Integrates the derivative relations by Fourier least squares; does not
/// check the Dirac residual or the periods.
WeierstrassImage weierstrass_image(const WeierstrassData &data);

/// Throws DiracResidualTooLarge or NonPeriodicImage. With allow_nonperiodic the
/// linear part is added to the node values (the result is then not periodic).
Immersion weierstrass_map(const WeierstrassData &data, const WeierstrassOptions &opt = {});

struct RecoveryOptions {
    double conformal_tolerance = 1e-6;
    /// Minimum |cos| between a wrapped value and its continuation.
    double branch_tolerance = 0.5;
};

/// Spinor whose Weierstrass image is X up to translation; the factorization
/// fixes it up to one global sign. Throws NotConformal or BranchInconsistency.
SpinorField recover_spinor(const Immersion &X, const RecoveryOptions &opt = {});

/// U = H e^α / 2 on the unit-period lattice. Throws NotConformal or DegenerateImmersion.
ScalarField extract_potential(const Immersion &X, double conformal_tolerance = 1e-6);

struct EnergyIdentity {
    double T;
    double H1;
    double rel_err;
};

/// T = willmore(X) against H1 = 4 Im(tau) <<U^2>>.
EnergyIdentity energy_identity_check(const Immersion &X, double conformal_tolerance = 1e-6);

/// Ψ -> αΨ + β(conj Ψ2, -conj Ψ1) with |α|^2 + |β|^2 = 1; same potential,
/// rotated image. Throws InvalidArgument if the pair is not unit.
SpinorField rotate_spinor(const SpinorField &s, cplx alpha, cplx beta);

} // namespace wmnv
