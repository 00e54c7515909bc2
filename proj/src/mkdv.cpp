#include "weiermnv/mkdv.hpp"

#include "weiermnv/errors.hpp"
#include "weiermnv/fft.hpp"
#include "weiermnv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace wmnv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double linf(const std::vector<double> &u) {
    double m = 0.0;
    for (double x : u) m = std::max(m, std::abs(x));
    return m;
}

void check_state(const FlowState &s) {
    const int n = static_cast<int>(s.u.size());
    if (n < 8 || n % 2 != 0) throw Error(ErrorCode::InvalidArgument, "flow needs an even number (>= 8) of samples");
    if (!(s.period > 0.0)) throw Error(ErrorCode::InvalidArgument, "flow period must be positive");
    for (double x : s.u)
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "flow state has non-finite samples");
}

} // namespace

double stability_budget(const FlowState &s) {
    check_state(s);
    const double kmax = kTwoPi * (static_cast<double>(s.u.size()) / 3.0) / s.period;
    const double a = std::abs(s.c) * std::pow(linf(s.u), 2) * kmax;
    return a > 0.0 ? 2.5 / a : std::numeric_limits<double>::infinity();
}

MkdvStepper::MkdvStepper(int n, double period, double c, double dt, bool enforce_budget)
    : n_(n), period_(period), c_(c), dt_(dt), enforce_budget_(enforce_budget) {
    if (n < 8 || n % 2 != 0) throw Error(ErrorCode::InvalidArgument, "flow needs an even number (>= 8) of samples");
    if (!(period > 0.0) || !std::isfinite(c) || !std::isfinite(dt) || dt == 0.0)
        throw Error(ErrorCode::InvalidArgument, "flow needs a positive period, finite c and a nonzero finite dt");
    k_.resize(n);
    keep_.resize(n);
    E_.resize(n);
    E2_.resize(n);
    Q_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    f3_.resize(n);
    constexpr int contour = 32;
    for (int i = 0; i < n; ++i) {
        const int m = fft::frequency(i, n);
        k_[i] = kTwoPi * m / period;
        keep_[i] = 3 * std::abs(m) <= n && 2 * std::abs(m) < n;
        const cplx L = -kI * std::pow(k_[i], 3);
        const cplx hL = dt * L;
        E_[i] = std::exp(hL);
        E2_[i] = std::exp(0.5 * hL);
        cplx q{}, a{}, b{}, g{};
        for (int j = 0; j < contour; ++j) {
            const cplx z = hL + std::polar(1.0, kTwoPi * (j + 0.5) / contour);
            const cplx ez = std::exp(z), z3 = z * z * z;
            q += (std::exp(0.5 * z) - 1.0) / z;
            a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
            b += (2.0 + z + ez * (z - 2.0)) / z3;
            g += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
        }
        Q_[i] = dt * q / double(contour);
        f1_[i] = dt * a / double(contour);
        f2_[i] = dt * b / double(contour);
        f3_[i] = dt * g / double(contour);
    }
}

std::vector<cplx> MkdvStepper::nonlinear(const std::vector<cplx> &v) const {
    // (c/3) d_x (u^3); padding to 2n makes the retained modes exact.
    const int P = 2 * n_;
    std::vector<cplx> pad(P), phys(P), out(n_);
    for (int i = 0; i < n_; ++i) {
        if (!keep_[i]) continue;
        const int m = fft::frequency(i, n_);
        pad[(m + P) % P] = 2.0 * v[i];
    }
    fft::inverse_1d(P, pad, phys);
    for (auto &x : phys) x = std::pow(x.real(), 3);
    fft::forward_1d(P, phys, pad);
    for (int i = 0; i < n_; ++i) {
        if (!keep_[i]) continue;
        const int m = fft::frequency(i, n_);
        out[i] = (c_ / 3.0) * kI * k_[i] * 0.5 * pad[(m + P) % P];
    }
    return out;
}

FlowState MkdvStepper::step(const FlowState &s) const {
    check_state(s);
    if (static_cast<int>(s.u.size()) != n_ || s.period != period_ || s.c != c_)
        throw Error(ErrorCode::InvalidArgument, "state does not match the stepper's size, period or coefficient");
    const double budget = stability_budget(s);
    if (enforce_budget_ && std::abs(dt_) > budget) {
        std::ostringstream msg;
        msg << "|dt| = " << std::abs(dt_) << " exceeds the stability budget " << budget;
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    std::vector<cplx> v(n_), tmp(s.u.begin(), s.u.end());
    fft::forward_1d(n_, tmp, v);
    for (int i = 0; i < n_; ++i)
        if (!keep_[i]) v[i] = 0.0;

    const auto Nv = nonlinear(v);
    std::vector<cplx> a(n_), b(n_), c(n_);
    for (int i = 0; i < n_; ++i) a[i] = E2_[i] * v[i] + Q_[i] * Nv[i];
    const auto Na = nonlinear(a);
    for (int i = 0; i < n_; ++i) b[i] = E2_[i] * v[i] + Q_[i] * Na[i];
    const auto Nb = nonlinear(b);
    for (int i = 0; i < n_; ++i) c[i] = E2_[i] * a[i] + Q_[i] * (2.0 * Nb[i] - Nv[i]);
    const auto Nc = nonlinear(c);
    for (int i = 0; i < n_; ++i)
        v[i] = E_[i] * v[i] + Nv[i] * f1_[i] + 2.0 * (Na[i] + Nb[i]) * f2_[i] + Nc[i] * f3_[i];

    fft::inverse_1d(n_, v, tmp);
    FlowState out = s;
    out.t = s.t + dt_;
    for (int i = 0; i < n_; ++i) out.u[i] = tmp[i].real();
    const double before = linf(s.u), after = linf(out.u);
    if (!std::isfinite(after) || after > 10.0 * std::max(before, 1e-300)) {
        std::ostringstream msg;
        msg << "max|u| went from " << before << " to " << after << " in one step at t = " << s.t;
        throw Error(ErrorCode::BlowupDetected, msg.str());
    }
    return out;
}

FlowState step(const FlowState &s, double dt) {
    check_state(s);
    return MkdvStepper(static_cast<int>(s.u.size()), s.period, s.c, dt).step(s);
}

ScalarField lift(const FlowState &s, int ny, double y_period) {
    check_state(s);
    if (y_period <= 0.0) y_period = s.period;
    const int n = static_cast<int>(s.u.size());
    const auto g = TorusGrid::make({0.0, y_period / s.period}, n, ny);
    ScalarField U(g);
    for (int k = 0; k < ny; ++k)
        for (int j = 0; j < n; ++j) U(j, k) = s.period * s.u[j];
    return U;
}

TrajectoryRow observe(const FlowState &s) {
    const auto h = mnv_recursion(lift(s), 3).invariants;
    double l2 = 0.0;
    for (double x : s.u) l2 += x * x;
    return {s.t, h[1], h[3], std::sqrt(l2 * s.period / double(s.u.size())), linf(s.u)};
}

std::vector<TrajectoryRow> integrate(FlowState &s, double dt, int steps, int record_every) {
    if (steps < 0 || record_every < 1) throw Error(ErrorCode::InvalidArgument, "steps >= 0 and record_every >= 1 required");
    check_state(s);
    const MkdvStepper stepper(static_cast<int>(s.u.size()), s.period, s.c, dt);
    std::vector<TrajectoryRow> rows{observe(s)};
    for (int i = 1; i <= steps; ++i) {
        s = stepper.step(s);
        if (i % record_every == 0 || i == steps) rows.push_back(observe(s));
    }
    return rows;
}

namespace {

CalibrationPoint drift_for(const std::vector<double> &u0, double period, double c, const CalibrationOptions &opt,
                           const TrajectoryRow &start) {
    FlowState s{u0, 0.0, c, period};
    const MkdvStepper stepper(static_cast<int>(u0.size()), period, c, opt.horizon / opt.steps);
    for (int i = 0; i < opt.steps; ++i) s = stepper.step(s);
    const auto end = observe(s);
    const double h3_scale = std::max(std::abs(start.h3), std::norm(start.h1));
    return {c, std::abs(end.h3 - start.h3) / h3_scale, std::abs(end.h1 - start.h1) / std::abs(start.h1)};
}

} // namespace

CalibrationResult calibrate_coefficient(const std::vector<double> &u0, double period, const CalibrationOptions &opt) {
    if (opt.candidates < 3 || !(opt.c_max > opt.c_min) || opt.steps < 1 || !(opt.horizon > 0.0))
        throw Error(ErrorCode::InvalidArgument, "calibration needs >= 3 candidates over an increasing range");
    FlowState s0{u0, 0.0, 0.0, period};
    check_state(s0);
    CalibrationResult res;
    const double mean = [&] {
        double m = 0.0;
        for (double x : u0) m += x;
        return m / double(u0.size());
    }();
    double spread = 0.0;
    for (double x : u0) spread = std::max(spread, std::abs(x - mean));
    if (spread <= 1e-14 * std::max(1.0, linf(u0))) {
        res.degenerate = true;
        res.c_star = opt.c_min;
        res.note = "constant initial data is stationary for every c; no coefficient is singled out";
        for (int i = 0; i < opt.candidates; ++i)
            res.curve.push_back({opt.c_min + (opt.c_max - opt.c_min) * i / (opt.candidates - 1), 0.0, 0.0});
        return res;
    }

    const auto start = observe(s0);
    res.curve.resize(opt.candidates);
    parallel_for(
        opt.candidates,
        [&](int i) {
            const double c = opt.c_min + (opt.c_max - opt.c_min) * i / (opt.candidates - 1);
            res.curve[i] = drift_for(u0, period, c, opt, start);
        },
        opt.threads);

    const auto best = std::min_element(res.curve.begin(), res.curve.end(), [](const auto &a, const auto &b) {
        return a.h3_drift < b.h3_drift;
    });
    const int ib = static_cast<int>(best - res.curve.begin());
    double a = res.curve[std::max(ib - 1, 0)].c, b = res.curve[std::min(ib + 1, opt.candidates - 1)].c;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = drift_for(u0, period, x1, opt, start).h3_drift, f2 = drift_for(u0, period, x2, opt, start).h3_drift;
    while (b - a > opt.refine_tolerance) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = drift_for(u0, period, x1, opt, start).h3_drift;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = drift_for(u0, period, x2, opt, start).h3_drift;
        }
    }
    const auto refined = drift_for(u0, period, 0.5 * (a + b), opt, start);
    if (refined.h3_drift <= best->h3_drift) {
        res.c_star = refined.c;
        res.drift_at_c_star = refined.h3_drift;
    } else {
        res.c_star = best->c;
        res.drift_at_c_star = best->h3_drift;
    }
    if (res.drift_at_c_star > 1e-3) {
        std::ostringstream msg;
        msg << "best relative h3 drift " << res.drift_at_c_star << " at c = " << res.c_star << " exceeds 1e-3";
        throw Error(ErrorCode::NoConservingCandidate, msg.str());
    }
    return res;
}

} // namespace wmnv
