#pragma once

// u_t = u_xxx + c u^2 u_x on a periodic interval, for potentials of surfaces of
// revolution (U depends on x only).

#include "weiermnv/invariants.hpp"
#include "weiermnv/torus_grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wmnv {

struct FlowState {
    std::vector<double> u; // uniform samples over [0, period)
    double t = 0.0;
    double c = 24.0;
    double period = 1.0;
};

/// Largest |dt| the explicit treatment of the cubic term is trusted with:
/// 2.5 / (c max u^2 k_max), k_max the largest retained wavenumber.
double stability_budget(const FlowState &s);

/// Exponential fourth-order Runge-Kutta (coefficients by contour integrals) for
/// the stiff linear part; the cubic term is formed on a twice-padded grid and kept
/// on |m| <= n/3. dt may be negative. Throws InvalidArgument (dt outside the
/// budget, bad sizes) or BlowupDetected (|u|_inf grows more than 10x in one step).
/// With enforce_budget off, oversized steps are taken and left to the blowup check.
class MkdvStepper {
public:
    MkdvStepper(int n, double period, double c, double dt, bool enforce_budget = true);

    FlowState step(const FlowState &s) const;
    double dt() const noexcept { return dt_; }

private:
    std::vector<cplx> nonlinear(const std::vector<cplx> &v) const;

    int n_;
    double period_, c_, dt_;
    bool enforce_budget_;
    std::vector<double> k_;
    std::vector<char> keep_;
    std::vector<cplx> E_, E2_, Q_, f1_, f2_, f3_;
};

/// One step with a freshly built stepper.
FlowState step(const FlowState &s, double dt);

/// U on a rectangular torus grid: t1 = x / period, τ = i y_period / period,
/// values period * u (the lattice is rescaled to unit first period).
ScalarField lift(const FlowState &s, int ny = 4, double y_period = 0.0);

struct TrajectoryRow {
    double t;
    cplx h1;
    cplx h3;
    double l2_norm;
    double linf_norm;
};

/// Invariants of the lifted field and norms of u.
TrajectoryRow observe(const FlowState &s);

/// Advances `steps` steps, recording the state every `record_every` steps (and
/// the initial one). Throws as MkdvStepper.
std::vector<TrajectoryRow> integrate(FlowState &s, double dt, int steps, int record_every = 1);

struct CalibrationPoint {
    double c;
    double h3_drift;
    double h1_drift;
};

struct CalibrationOptions {
    double c_min = 0.0;
    double c_max = 48.0;
    int candidates = 13;
    double horizon = 0.01;
    int steps = 8000;
    /// Golden-section refinement around the best candidate, down to this width.
    double refine_tolerance = 1e-6;
    int threads = 0;
};

struct CalibrationResult {
    double c_star = 0.0;
    double drift_at_c_star = 0.0;
    std::vector<CalibrationPoint> curve;
    bool degenerate = false;
    std::string note;
};

/// c minimizing the relative drift of h_3 over the horizon. Constant data gives
/// a degenerate result with a note. Throws NoConservingCandidate when the best
/// drift exceeds 1e-3.
CalibrationResult calibrate_coefficient(const std::vector<double> &u0, double period,
                                        const CalibrationOptions &opt = {});

} // namespace wmnv
