#include "weiermnv/weierstrass.hpp"

#include "weiermnv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wmnv {

namespace {

constexpr cplx kI{0.0, 1.0};

// Zero-mean g minimizing |g_z - a|^2 + |g_zbar - b|^2 over Fourier modes; the
// means of a and b are returned as the coefficients of z and zbar.
struct LinearAndPeriodic {
    ScalarField periodic;
    cplx dz_mean;
    cplx dzbar_mean;
};

LinearAndPeriodic integrate(const ScalarField &a, const ScalarField &b) {
    const TorusGrid &g = a.grid();
    const Spectrum sa(a), sb(b);
    const auto sz = symbol_z(g), szb = symbol_zbar(g);
    const auto ca = sa.coefficients(), cb = sb.coefficients();
    std::vector<cplx> symbol_a(g.size()), symbol_b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double den = std::norm(sz[i]) + std::norm(szb[i]);
        if (den == 0.0) continue;
        symbol_a[i] = std::conj(sz[i]) / den;
        symbol_b[i] = std::conj(szb[i]) / den;
    }
    ScalarField p = sa.apply(symbol_a);
    p += sb.apply(symbol_b);
    const double n = static_cast<double>(g.size());
    return {std::move(p), ca[0] / n, cb[0] / n};
}

Vec3 to_vec(cplx w, double x3) { return Vec3(w.real(), -w.imag(), x3); }

} // namespace

SpinorField::SpinorField(ScalarField p1, ScalarField p2, int m1, int m2)
    : psi1(std::move(p1)), psi2(std::move(p2)), mult1(m1), mult2(m2) {
    require_same_grid(psi1, psi2);
    if ((m1 != 1 && m1 != -1) || (m2 != 1 && m2 != -1))
        throw Error(ErrorCode::InvalidArgument, "spinor multipliers must be +1 or -1");
}

ScalarField SpinorField::density() const { return psi1.abs2() + psi2.abs2(); }

double dirac_residual(const ScalarField &U, const ScalarField &psi1, const ScalarField &psi2, Twist twist) {
    require_same_grid(U, psi1);
    require_same_grid(U, psi2);
    const Spectrum s1(psi1, twist), s2(psi2, twist);
    const auto p1z = s1.d_z(), p1zb = s1.d_zbar(), p2z = s2.d_z(), p2zb = s2.d_zbar();
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) {
        const cplx u2 = U[i] * psi2[i], u1 = U[i] * psi1[i];
        worst = std::max(worst, std::abs(p1z[i] - u2) + std::abs(p2zb[i] + u1));
        scale = std::max({scale, std::abs(p1z[i]), std::abs(p1zb[i]), std::abs(p2z[i]), std::abs(p2zb[i]),
                          std::abs(u1), std::abs(u2)});
    }
    if (scale == 0.0) scale = std::max(psi1.max_abs(), psi2.max_abs());
    return scale > 0.0 ? worst / scale : 0.0;
}

double dirac_residual(const ScalarField &U, const SpinorField &s) {
    return dirac_residual(U, s.psi1, s.psi2, s.twist());
}

WeierstrassImage weierstrass_image(const WeierstrassData &data) {
    const SpinorField &s = data.spinor;
    const TorusGrid &g = s.grid();
    const cplx tau = g.tau();
    const auto w = integrate(kI * (s.psi2 * s.psi2), -kI * (s.psi1 * s.psi1));
    const auto x3 = integrate(-(s.psi2 * s.psi1.conj()), -(s.psi1 * s.psi2.conj()));

    WeierstrassImage img;
    img.periodic.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) img.periodic[i] = to_vec(w.periodic[i], x3.periodic[i].real());
    img.period_t1 = to_vec(w.dz_mean + w.dzbar_mean, (x3.dz_mean + x3.dzbar_mean).real());
    img.period_t2 = to_vec(w.dz_mean * tau + w.dzbar_mean * std::conj(tau),
                           (x3.dz_mean * tau + x3.dzbar_mean * std::conj(tau)).real());
    const double mean_factor = average(s.density()).real();
    const double per = std::max(img.period_t1.norm(), img.period_t2.norm() / std::abs(tau));
    img.relative_period = mean_factor > 0.0 ? per / mean_factor : per;
    return img;
}

Immersion weierstrass_map(const WeierstrassData &data, const WeierstrassOptions &opt) {
    const double res = dirac_residual(data.U, data.spinor);
    if (res > opt.dirac_tolerance) {
        std::ostringstream msg;
        msg << "Dirac residual " << res << " exceeds " << opt.dirac_tolerance;
        throw Error(ErrorCode::DiracResidualTooLarge, msg.str());
    }
    const TorusGrid &g = data.spinor.grid();
    auto img = weierstrass_image(data);
    if (img.relative_period > opt.period_tolerance) {
        if (!opt.allow_nonperiodic) {
            std::ostringstream msg;
            msg << "image does not close: periods (" << img.period_t1.transpose() << ") and ("
                << img.period_t2.transpose() << "), relative size " << img.relative_period;
            throw Error(ErrorCode::NonPeriodicImage, msg.str());
        }
        for (int k = 0; k < g.ny(); ++k)
            for (int j = 0; j < g.nx(); ++j)
                img.periodic[g.index(j, k)] += g.t1(j) * img.period_t1 + g.t2(k) * img.period_t2;
    }
    const Vec3 shift = data.constants - img.periodic[g.index(data.base_j, data.base_k)];
    for (auto &p : img.periodic) p += shift;
    return Immersion(g, std::move(img.periodic));
}

SpinorField recover_spinor(const Immersion &X, const RecoveryOptions &opt) {
    if (!(X.conformality_residual() <= opt.conformal_tolerance)) {
        std::ostringstream msg;
        msg << "conformality residual " << X.conformality_residual() << " exceeds " << opt.conformal_tolerance;
        throw Error(ErrorCode::NotConformal, msg.str());
    }
    const TorusGrid &g = X.grid();
    const int nx = g.nx(), ny = g.ny();
    const ScalarField w = X.component(0) - kI * X.component(1);
    const Spectrum sw(w);
    const auto sq2 = -kI * sw.d_z();   // Ψ2^2
    const auto sq1 = kI * sw.d_zbar(); // Ψ1^2
    const auto c = d_z(X.component(2)); // -Ψ2 conj(Ψ1)

    double top = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) top = std::max(top, std::abs(sq1[i]) + std::abs(sq2[i]));

    // Sign-free candidate per node: root of the dominant square, partner from the X3 relation.
    std::vector<cplx> c1(g.size()), c2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(std::abs(sq1[i]) + std::abs(sq2[i]) > 1e-14 * top))
            throw Error(ErrorCode::DegenerateImmersion, "immersion differential vanishes at a node");
        if (std::abs(sq2[i]) >= std::abs(sq1[i])) {
            c2[i] = std::sqrt(sq2[i]);
            c1[i] = -std::conj(c[i]) / std::conj(c2[i]);
        } else {
            c1[i] = std::sqrt(sq1[i]);
            c2[i] = -c[i] / std::conj(c1[i]);
        }
    }
    const auto corr = [&](std::size_t a, std::size_t b) {
        const double dot = (std::conj(c1[a]) * c1[b] + std::conj(c2[a]) * c2[b]).real();
        const double na = std::sqrt(std::norm(c1[a]) + std::norm(c2[a]));
        const double nb = std::sqrt(std::norm(c1[b]) + std::norm(c2[b]));
        return dot / (na * nb);
    };
    const auto align = [&](std::size_t target, std::size_t ref) {
        if (corr(ref, target) < 0.0) {
            c1[target] = -c1[target];
            c2[target] = -c2[target];
        }
    };
    for (int j = 1; j < nx; ++j) align(g.index(j, 0), g.index(j - 1, 0));
    for (int j = 0; j < nx; ++j)
        for (int k = 1; k < ny; ++k) align(g.index(j, k), g.index(j, k - 1));

    const auto branch_error = [&](const char *what, int j, int k, double cs) {
        std::ostringstream msg;
        msg << what << " at node (" << j << ", " << k << "): correlation " << cs;
        return Error(ErrorCode::BranchInconsistency, msg.str());
    };
    for (int k = 0; k < ny; ++k)
        for (int j = 1; j < nx; ++j) {
            const double cs = corr(g.index(j - 1, k), g.index(j, k));
            if (cs < opt.branch_tolerance) throw branch_error("discontinuous square root", j, k, cs);
        }
    int mult1 = 0, mult2 = 0;
    for (int k = 0; k < ny; ++k) {
        const double cs = corr(g.index(nx - 1, k), g.index(0, k));
        if (std::abs(cs) < opt.branch_tolerance) throw branch_error("ambiguous multiplier along t1", 0, k, cs);
        const int m = cs > 0 ? 1 : -1;
        if (mult1 != 0 && m != mult1) throw branch_error("multiplier along t1 changes", 0, k, cs);
        mult1 = m;
    }
    for (int j = 0; j < nx; ++j) {
        const double cs = corr(g.index(j, ny - 1), g.index(j, 0));
        if (std::abs(cs) < opt.branch_tolerance) throw branch_error("ambiguous multiplier along t2", j, 0, cs);
        const int m = cs > 0 ? 1 : -1;
        if (mult2 != 0 && m != mult2) throw branch_error("multiplier along t2 changes", j, 0, cs);
        mult2 = m;
    }
    return SpinorField(ScalarField(g, std::move(c1)), ScalarField(g, std::move(c2)), mult1, mult2);
}

ScalarField extract_potential(const Immersion &X, double conformal_tolerance) {
    const auto forms = fundamental_forms(X);
    const auto ea = conformal_factor(X, forms, conformal_tolerance);
    const auto h = forms.mean_curvature();
    ScalarField u(X.grid());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * h[i] * ea[i].real();
    return u;
}

EnergyIdentity energy_identity_check(const Immersion &X, double conformal_tolerance) {
    const double T = willmore(X);
    const auto u = extract_potential(X, conformal_tolerance);
    const double h1 = 4.0 * X.grid().tau().imag() * average(u * u).real();
    const double rel = T != 0.0 ? std::abs(T - h1) / std::abs(T) : std::abs(h1);
    return {T, h1, rel};
}

SpinorField rotate_spinor(const SpinorField &s, cplx alpha, cplx beta) {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidArgument, "rotation parameters must satisfy |alpha|^2 + |beta|^2 = 1");
    return SpinorField(alpha * s.psi1 + beta * s.psi2.conj(), alpha * s.psi2 - beta * s.psi1.conj(), s.mult1,
                       s.mult2);
}

} // namespace wmnv
