#include "weiermnv/invariants.hpp"

#include "weiermnv/errors.hpp"

#include <cmath>
#include <sstream>

namespace wmnv {

void require_real_potential(const ScalarField &U, double tol) {
    const double im = U.max_abs_imag();
    if (im > tol * U.max_abs()) {
        std::ostringstream msg;
        msg << "potential has max|Im U| = " << im << " against max|U| = " << U.max_abs();
        throw Error(ErrorCode::NonRealPotential, msg.str());
    }
}

MnvResult mnv_recursion(const ScalarField &U, int K) {
    require_real_potential(U);
    if (K < 1) throw Error(ErrorCode::InvalidArgument, "recursion depth K must be >= 1");
    const TorusGrid &g = U.grid();

    MnvResult out;
    auto &phi = out.jets.phi;
    auto &chi = out.jets.chi;
    auto &h = out.invariants.h;
    for (int k = 1; k <= K; ++k) {
        if (k == 1) chi.push_back(-U);
        else chi.push_back(-(d_zbar(chi[k - 2]) + U * phi[k - 2]));

        ScalarField rhs = U * chi[k - 1];
        for (int j = 1; j < k; ++j) rhs -= h[j - 1] * phi[k - j - 1];
        const cplx hk = average(rhs);
        h.push_back(hk);
        rhs += -hk;
        // Mean removed exactly above; the inverse only needs to skip its own check.
        phi.push_back(d_z_inverse(rhs, 1.0));
    }

    auto &inv = out.invariants;
    for (int k = 2; k <= K; k += 2) inv.even_residual = std::max(inv.even_residual, std::abs(h[k - 1]));
    inv.nx = g.nx();
    inv.ny = g.ny();
    inv.tau = g.tau();
    inv.tail_ratio = spectral_tail_ratio(phi.back());
    inv.resolution_warning = inv.tail_ratio > 1e-8;
    return out;
}

cplx h1_direct(const ScalarField &U) {
    require_real_potential(U);
    return -average(U * U);
}

cplx h3_direct(const ScalarField &U) {
    require_real_potential(U);
    const cplx h1 = -average(U * U);
    ScalarField q = U * U;
    q += h1;
    q += -average(q);
    const ScalarField v1 = d_z_inverse(q, 1.0);
    const Spectrum su(U);
    const ScalarField uzz = su.apply([&] {
        auto s = symbol_zbar(U.grid());
        for (auto &x : s) x *= x;
        return s;
    }());
    return -average(U * uzz + q * d_zbar(v1));
}

} // namespace wmnv
