#pragma once

#include "weiermnv/torus_grid.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace wmnv {

using Vec3 = Eigen::Vector3d;

/// Closed curve (r(s), h(s)), s in [0, 2π), in the half-plane r > 0, held as a
/// trigonometric polynomial. Self-intersection is not checked.
class ProfileCurve {
public:
    /// Uniform samples at s_i = 2π i / N. A repeated closing sample is dropped.
    static ProfileCurve from_samples(const std::vector<double> &r, const std::vector<double> &h);
    /// r(s) = Σ_k a_k cos(ks) + b_k sin(ks), each entry is (a_k, b_k), k = 0, 1, ...
    static ProfileCurve from_fourier(const std::vector<std::pair<double, double>> &r_coeffs,
                                     const std::vector<std::pair<double, double>> &h_coeffs);
    /// Round tube of radius `tube` at distance `center` from the axis: (R + r cos s, r sin s).
    static ProfileCurve torus(double center, double tube);

    double r(double s) const;
    double h(double s) const;
    double dr(double s) const;
    double dh(double s) const;
    /// Highest harmonic carried by the representation.
    int degree() const noexcept { return degree_; }
    /// +1 when the curve winds counter-clockwise in the (r, h) half-plane.
    int orientation() const;

    ProfileCurve scaled(double k) const;

private:
    // Complex coefficients c_k for k = -degree..degree, stored at index k + degree.
    double eval(const std::vector<cplx> &c, double s, bool derivative) const;

    int degree_ = 0;
    std::vector<cplx> r_coeffs_;
    std::vector<cplx> h_coeffs_;
};

/// Doubly periodic map of the lattice into R^3, stored node-wise.
class Immersion {
public:
    Immersion(const TorusGrid &grid, std::vector<Vec3> points);

    const TorusGrid &grid() const noexcept { return grid_; }
    const std::vector<Vec3> &points() const noexcept { return points_; }
    const Vec3 &point(int j, int k) const { return points_[grid_.index(j, k)]; }
    /// max over nodes of |<X_z, X_z>| / |X_z|^2 (complex-bilinear numerator).
    double conformality_residual() const noexcept { return conformality_residual_; }
    /// Component i (0..2) as a complex grid field.
    ScalarField component(int i) const;
    /// Largest distance between a node and its lattice neighbours (including diagonals).
    double max_cell_diameter() const;

private:
    TorusGrid grid_;
    std::vector<Vec3> points_;
    double conformality_residual_;
};

double conformality_residual(const TorusGrid &grid, const std::vector<Vec3> &points);

/// First and second fundamental forms with respect to the Cartesian coordinates
/// (x, y) of the z-plane, and the unit normal X_x × X_y / |X_x × X_y|.
struct FundamentalForms {
    std::vector<double> E, F, G;
    std::vector<double> L, M, N;
    std::vector<Vec3> normal;

    /// (EN - 2FM + GL) / (2(EG - F^2)), signed with respect to `normal`.
    std::vector<double> mean_curvature() const;
    std::vector<double> area_element() const;
};

struct RevolutionTorus {
    Immersion immersion;
    /// Profile parameter s at each conformal node j (length nx).
    std::vector<double> profile_parameter;
    /// Total conformal length ∮ dσ / r of the profile; tau = 2πi / conformal_length.
    double conformal_length;
};

/// Samples the surface of revolution of `profile` about the X3 axis in conformal
/// coordinates: t1 runs along the profile (dx = dσ/r), t2 around the axis.
/// Throws DegenerateProfile or BadResolution.
RevolutionTorus revolve_detailed(const ProfileCurve &profile, int ny, int nx_hint);
Immersion revolve(const ProfileCurve &profile, int ny, int nx_hint);

/// Throws DegenerateImmersion if EG - F^2 <= 1e-12 max(E) max(G) anywhere.
FundamentalForms fundamental_forms(const Immersion &X);

/// ∫ H^2 dS by the periodic trapezoid rule.
double willmore(const Immersion &X);

/// e^α with ds^2 = e^{2α} |dz|^2. Throws NotConformal when the cached
/// residual exceeds `max_residual`.
ScalarField conformal_factor(const Immersion &X, double max_residual = 1e-6);
ScalarField conformal_factor(const Immersion &X, const FundamentalForms &forms, double max_residual = 1e-6);

} // namespace wmnv
