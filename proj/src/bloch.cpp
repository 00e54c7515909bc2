#include "weiermnv/bloch.hpp"

#include "weiermnv/errors.hpp"
#include "weiermnv/fft.hpp"
#include "weiermnv/parallel.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace wmnv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// Trigonometric interpolant of uniform samples on [0, period).
class Interpolant {
public:
    Interpolant(std::span<const double> u, double period) : period_(period), n_(static_cast<int>(u.size())) {
        std::vector<cplx> in(u.begin(), u.end()), out(u.size());
        fft::forward_1d(n_, in, out);
        for (auto &c : out) c /= double(n_);
        if (n_ % 2 == 0) out[n_ / 2] *= 0.5; // split the Nyquist bin between ±n/2
        coeffs_ = std::move(out);
    }

    double operator()(double x) const {
        const cplx step = std::polar(1.0, kTwoPi * x / period_);
        double sum = coeffs_[0].real();
        cplx e = step;
        for (int m = 1; m <= n_ / 2; ++m, e *= step) {
            // c_m e^{imθ} + c_{-m} e^{-imθ}, with c_{-m} = conj(c_m) for real samples.
            const cplx cm = coeffs_[m];
            const cplx cneg = (n_ % 2 == 0 && m == n_ / 2) ? coeffs_[m] : coeffs_[n_ - m];
            sum += (cm * e + cneg * std::conj(e)).real();
        }
        return sum;
    }

private:
    double period_;
    int n_;
    std::vector<cplx> coeffs_;
};

Eigen::Matrix2cd expm_traceless(const Eigen::Matrix2cd &W) {
    const cplx s2 = -W.determinant();
    const cplx s = std::sqrt(s2);
    cplx c, sh;
    if (std::abs(s) < 1e-4) {
        c = 1.0 + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0;
        sh = 1.0 + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0;
    } else {
        c = std::cosh(s);
        sh = std::sinh(s) / s;
    }
    return c * Eigen::Matrix2cd::Identity() + sh * W;
}

Eigen::Matrix2cd transfer(const Interpolant &U, double period, double kappa, int steps) {
    const double h = period / steps;
    const double g1 = 0.5 - std::sqrt(3.0) / 6.0, g2 = 0.5 + std::sqrt(3.0) / 6.0;
    const auto A = [&](double x) {
        const double u = U(x);
        Eigen::Matrix2cd a;
        a << -kappa, 2.0 * u, -2.0 * u, kappa;
        return a;
    };
    Eigen::Matrix2cd Y = Eigen::Matrix2cd::Identity();
    for (int i = 0; i < steps; ++i) {
        const double x = i * h;
        const Eigen::Matrix2cd A1 = A(x + g1 * h), A2 = A(x + g2 * h);
        const Eigen::Matrix2cd W = 0.5 * h * (A1 + A2) + (std::sqrt(3.0) / 12.0) * h * h * (A2 * A1 - A1 * A2);
        Y = expm_traceless(W) * Y;
    }
    return Y;
}

// Fourier data of U needed by the truncated operator.
struct PotentialModes {
    const TorusGrid *grid;
    std::vector<cplx> coeffs; // normalized, FFT bin order
    double l1 = 0.0;
    double l1_axis = 0.0; // t2 frequency zero only
    bool x_only = false;

    cplx at(int dm, int dn) const {
        const int nx = grid->nx(), ny = grid->ny();
        if (2 * std::abs(dm) >= nx || 2 * std::abs(dn) >= ny) return {};
        const int j = (dm % nx + nx) % nx, k = (dn % ny + ny) % ny;
        return coeffs[grid->index(j, k)];
    }
};

PotentialModes potential_modes(const ScalarField &U, const BlochOptions &opt) {
    PotentialModes pm{&U.grid(), {}, 0.0, 0.0, false};
    const Spectrum s(U);
    const auto c = s.coefficients();
    const double norm = double(U.size());
    pm.coeffs.assign(c.begin(), c.end());
    const int nx = U.grid().nx(), ny = U.grid().ny();
    for (int k = 0; k < ny; ++k)
        for (int j = 0; j < nx; ++j) {
            auto &v = pm.coeffs[U.grid().index(j, k)];
            v /= norm;
            if (2 * std::abs(fft::frequency(j, nx)) >= nx || 2 * std::abs(fft::frequency(k, ny)) >= ny) continue;
            pm.l1 += std::abs(v);
            if (k == 0) pm.l1_axis += std::abs(v);
        }
    pm.x_only = pm.l1 - pm.l1_axis <= opt.axis_tolerance * pm.l1;
    return pm;
}

struct FreeSymbols {
    cplx tau, tau_bar;
    double abs_tau;
    cplx p1, p2;

    cplx dt1(int m) const { return kI * (kTwoPi * m + p1); }
    cplx dt2(int n) const { return kI * (kTwoPi * n + p2 * abs_tau); }
    cplx dz(int m, int n) const { return (tau_bar * dt1(m) - dt2(n)) / (tau_bar - tau); }
    cplx dzbar(int m, int n) const { return (tau * dt1(m) - dt2(n)) / (tau - tau_bar); }
    double diag(int m, int n) const { return std::min(std::abs(dz(m, n)), std::abs(dzbar(m, n))); }
};

FreeSymbols free_symbols(const TorusGrid &g, cplx p1, cplx p2) {
    return {g.tau(), std::conj(g.tau()), std::abs(g.tau()), p1, p2};
}

bool resolved(const FreeSymbols &fs, double l1, int M, double factor) {
    const int h = (M - 1) / 2;
    double edge = std::numeric_limits<double>::infinity(), inner = edge;
    for (int n = -h; n <= h; ++n)
        for (int m = -h; m <= h; ++m) {
            const double d = fs.diag(m, n);
            if (std::abs(m) == h || std::abs(n) == h) edge = std::min(edge, d);
            else inner = std::min(inner, d);
        }
    return edge >= factor * l1 && edge > inner;
}

double smallest_sv(const Eigen::MatrixXcd &A, double &largest) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    const auto &s = svd.singularValues();
    largest = s(0);
    return s(s.size() - 1);
}

Eigen::MatrixXcd block_operator(const PotentialModes &pm, const FreeSymbols &fs, int h, int n) {
    const int M = 2 * h + 1;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * M, 2 * M);
    for (int i = 0; i < M; ++i) {
        const int m = i - h;
        A(i, i) = fs.dz(m, n);
        A(M + i, M + i) = fs.dzbar(m, n);
        for (int j = 0; j < M; ++j) {
            const cplx u = pm.at(m - (j - h), 0);
            A(i, M + j) = -u;
            A(M + i, j) = u;
        }
    }
    return A;
}

Eigen::MatrixXcd full_operator(const PotentialModes &pm, const FreeSymbols &fs, int h) {
    const int M = 2 * h + 1, N = M * M;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
    for (int r = 0; r < N; ++r) {
        const int m = r % M - h, n = r / M - h;
        A(r, r) = fs.dz(m, n);
        A(N + r, N + r) = fs.dzbar(m, n);
        for (int c = 0; c < N; ++c) {
            const cplx u = pm.at(m - (c % M - h), n - (c / M - h));
            if (u == cplx{}) continue;
            A(r, N + c) = -u;
            A(N + r, c) = u;
        }
    }
    return A;
}

// Newton correction for p2 from the smallest singular triplet (σ, u, v) of A:
// A depends on p2 only through its diagonal, with d/dp2 = diag(α I, -α I).
cplx newton_step(const Eigen::MatrixXcd &A, const FreeSymbols &fs) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index last = svd.singularValues().size() - 1, half = A.rows() / 2;
    const auto u = svd.matrixU().col(last), v = svd.matrixV().col(last);
    const cplx alpha = -kI * fs.abs_tau / (fs.tau_bar - fs.tau);
    const cplx slope = alpha * (u.head(half).dot(v.head(half)) - u.tail(half).dot(v.tail(half)));
    if (std::abs(slope) == 0.0) return std::numeric_limits<double>::infinity();
    return -svd.singularValues()(last) / slope;
}

BlochEvaluation evaluate(const PotentialModes &pm, cplx p1, cplx p2, int M, const BlochOptions &opt,
                         cplx *step = nullptr) {
    if (M < 3 || M % 2 == 0) throw Error(ErrorCode::InvalidArgument, "truncation order M must be odd and >= 3");
    const FreeSymbols fs = free_symbols(*pm.grid, p1, p2);
    if (!resolved(fs, pm.l1, M, opt.resolve_factor)) {
        std::ostringstream msg;
        msg << "truncation M = " << M << " does not resolve (p1, p2) = (" << p1 << ", " << p2 << ")";
        throw Error(ErrorCode::TruncationTooSmall, msg.str());
    }
    const int h = (M - 1) / 2;
    BlochEvaluation out;
    out.M = M;
    out.block_diagonal = pm.x_only;
    if (!pm.x_only) {
        const auto A = full_operator(pm, fs, h);
        out.sigma_min = smallest_sv(A, out.sigma_max);
        if (step) *step = newton_step(A, fs);
    } else {
        // Each t2 mode n is its own block. Weyl: block singular values lie within
        // l1_axis of the free diagonal's, so most blocks need no decomposition.
        // The scale is taken from the block with the largest free diagonal.
        struct Block {
            int n;
            double lo, hi;
            bool done = false;
        };
        std::vector<Block> blocks;
        for (int n = -h; n <= h; ++n) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (int m = -h; m <= h; ++m) {
                const double a = std::abs(fs.dz(m, n)), b = std::abs(fs.dzbar(m, n));
                lo = std::min({lo, a, b});
                hi = std::max({hi, a, b});
            }
            blocks.push_back({n, lo, hi});
        }
        const double C = pm.l1_axis;
        const auto top = std::max_element(blocks.begin(), blocks.end(),
                                          [](const Block &a, const Block &b) { return a.hi < b.hi; });
        double smax = 0.0;
        double smin = smallest_sv(block_operator(pm, fs, h, top->n), smax);
        int argmin = top->n;
        top->done = true;
        std::sort(blocks.begin(), blocks.end(), [](const Block &a, const Block &b) { return a.lo < b.lo; });
        for (auto &b : blocks) {
            if (b.lo - C >= smin) break;
            if (b.done) continue;
            double big;
            const double s = smallest_sv(block_operator(pm, fs, h, b.n), big);
            if (s < smin) {
                smin = s;
                argmin = b.n;
            }
        }
        if (step) *step = newton_step(block_operator(pm, fs, h, argmin), fs);
        out.sigma_min = smin;
        out.sigma_max = smax;
    }
    out.residual = out.sigma_max > 0.0 ? out.sigma_min / out.sigma_max : 0.0;
    return out;
}

int choose_M(const PotentialModes &pm, std::span<const std::array<cplx, 2>> points, int max_M, double factor) {
    int M = 5;
    for (const auto &p : points) {
        const FreeSymbols fs = free_symbols(*pm.grid, p[0], p[1]);
        // Grow ring by ring, tracking the interior minimum.
        double inner = fs.diag(0, 0);
        int h = 1;
        for (;; ++h) {
            if (2 * h + 1 > max_M) {
                std::ostringstream msg;
                msg << "no truncation up to M = " << max_M << " resolves (p1, p2) = (" << p[0] << ", " << p[1] << ")";
                throw Error(ErrorCode::TruncationTooSmall, msg.str());
            }
            double edge = std::numeric_limits<double>::infinity();
            for (int i = -h; i <= h; ++i)
                edge = std::min({edge, fs.diag(i, h), fs.diag(i, -h), fs.diag(h, i), fs.diag(-h, i)});
            if (2 * h + 1 >= M && edge >= factor * pm.l1 && edge > inner) break;
            inner = std::min(inner, edge);
        }
        M = std::max(M, 2 * h + 1);
    }
    for (bool ok = false; !ok;) {
        ok = true;
        for (const auto &p : points)
            if (!resolved(free_symbols(*pm.grid, p[0], p[1]), pm.l1, M, factor)) {
                ok = false;
                break;
            }
        if (!ok) {
            M += 2;
            if (M > max_M) throw Error(ErrorCode::TruncationTooSmall, "no truncation resolves every scan point");
        }
    }
    return M;
}

// Golden-section minimum of f on [a, b].
template <class F>
double golden(F &&f, double a, double b, double tol, double &fmin) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (std::abs(b - a) > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fmin = std::min(fc, fd);
    return fc < fd ? c : d;
}

int branch_of(double re, double period) { return static_cast<int>(std::lround(re / period)); }

} // namespace

cplx MonodromyData::w2(double y_period) const { return std::exp(kI * kappa * y_period); }

MonodromyData floquet_monodromy(std::span<const double> u, double period, double kappa, const MonodromyOptions &opt) {
    if (u.size() < 2 || !(period > 0.0) || !std::isfinite(kappa))
        throw Error(ErrorCode::InvalidArgument, "monodromy needs >= 2 samples, a positive period and finite kappa");
    const Interpolant U(u, period);
    int steps = std::max(opt.min_steps, 1);
    Eigen::Matrix2cd coarse = transfer(U, period, kappa, steps);
    for (;;) {
        if (2 * steps > opt.max_steps) {
            std::ostringstream msg;
            msg << "transfer matrix not converged at " << steps << " steps (kappa = " << kappa << ")";
            throw Error(ErrorCode::IntegrationFailure, msg.str());
        }
        const Eigen::Matrix2cd fine = transfer(U, period, kappa, 2 * steps);
        steps *= 2;
        const double diff = (fine - coarse).cwiseAbs().maxCoeff();
        coarse = fine;
        if (diff < opt.tolerance * std::max(1.0, fine.cwiseAbs().maxCoeff())) break;
    }
    MonodromyData out;
    out.kappa = kappa;
    out.matrix = coarse;
    out.steps = steps;
    const cplx tr = coarse.trace(), det = coarse.determinant();
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    const cplx big = std::abs(tr + disc) >= std::abs(tr - disc) ? 0.5 * (tr + disc) : 0.5 * (tr - disc);
    out.eigenvalues = {det / big, big};
    return out;
}

BlochEvaluation bloch_det(const ScalarField &U, cplx p1, cplx p2, int M, const BlochOptions &opt) {
    return evaluate(potential_modes(U, opt), p1, p2, M, opt);
}

int choose_truncation(const ScalarField &U, std::span<const std::array<cplx, 2>> points, int max_M,
                      const BlochOptions &opt) {
    return choose_M(potential_modes(U, opt), points, max_M, opt.resolve_factor);
}

SliceResult dispersion_slice(const ScalarField &U, cplx w1, const SliceWindow &win, const SliceOptions &opt) {
    if (!(std::abs(w1) > 0.0) || !std::isfinite(std::abs(w1)))
        throw Error(ErrorCode::InvalidArgument, "w1 must be finite and nonzero");
    const bool two_d = win.samples_im > 1;
    if (win.samples_re < 3 || (two_d && win.samples_im < 3) || !(win.p2_hi.real() > win.p2_lo.real()) ||
        (two_d && !(win.p2_hi.imag() > win.p2_lo.imag())) || win.max_count < 1)
        throw Error(ErrorCode::InvalidArgument, "scan window needs an increasing range and >= 3 samples per scanned axis");

    const PotentialModes pm = potential_modes(U, opt.bloch);
    const TorusGrid &g = U.grid();
    const double period2 = kTwoPi / std::abs(g.tau());

    SliceResult res;
    res.p1 = -kI * std::log(w1);
    res.nx = g.nx();
    res.ny = g.ny();
    res.block_diagonal = pm.x_only;

    const int nr = win.samples_re, ni = two_d ? win.samples_im : 1;
    const double dre = (win.p2_hi.real() - win.p2_lo.real()) / (nr - 1);
    const double dim = two_d ? (win.p2_hi.imag() - win.p2_lo.imag()) / (ni - 1) : 0.0;
    const auto node = [&](int i, int k) { return cplx(win.p2_lo.real() + i * dre, win.p2_lo.imag() + k * dim); };

    std::vector<std::array<cplx, 2>> pts;
    for (int k = 0; k < ni; ++k)
        for (int i = 0; i < nr; ++i) pts.push_back({res.p1, node(i, k)});
    res.M = opt.M > 0 ? opt.M : choose_M(pm, pts, 121, opt.bloch.resolve_factor);

    std::vector<double> r(pts.size());
    parallel_for(
        static_cast<int>(pts.size()),
        [&](int i) { r[i] = evaluate(pm, res.p1, pts[i][1], res.M, opt.bloch).residual; }, opt.bloch.threads);

    const auto at = [&](int i, int k) { return r[static_cast<std::size_t>(k) * nr + i]; };
    std::vector<std::pair<int, int>> minima;
    for (int k = two_d ? 1 : 0; k < (two_d ? ni - 1 : 1); ++k)
        for (int i = 1; i < nr - 1; ++i) {
            bool is_min = true;
            for (int dk = (two_d ? -1 : 0); dk <= (two_d ? 1 : 0) && is_min; ++dk)
                for (int di = -1; di <= 1; ++di)
                    if ((di || dk) && at(i + di, k + dk) < at(i, k)) {
                        is_min = false;
                        break;
                    }
            if (is_min) minima.push_back({i, k});
        }

    // Each scan minimum is polished from the node and, in 1D, from both half-cells,
    // since a second root can share the scan cell.
    std::vector<std::vector<std::pair<cplx, double>>> cands(minima.size());
    parallel_for(
        static_cast<int>(minima.size()),
        [&](int idx) {
            const auto [i, k] = minima[idx];
            cplx p = node(i, k);
            const auto f = [&](cplx q) { return evaluate(pm, res.p1, q, res.M, opt.bloch).residual; };
            double val = at(i, k);
            const double tol = opt.polish_tolerance * std::max(1.0, std::abs(p));
            const double lo_re = p.real() - dre, hi_re = p.real() + dre;
            const double lo_im = two_d ? p.imag() - dim : p.imag(), hi_im = two_d ? p.imag() + dim : p.imag();
            const auto inside = [&](cplx q) {
                return q.real() >= lo_re && q.real() <= hi_re && q.imag() >= lo_im - 1e-8 && q.imag() <= hi_im + 1e-8;
            };
            // Newton on the smallest singular triplet; golden section when it stalls.
            const auto newton = [&](cplx q, double &v) {
                for (int it = 0; it < 30; ++it) {
                    cplx d;
                    v = evaluate(pm, res.p1, q, res.M, opt.bloch, &d).residual;
                    if (!std::isfinite(std::abs(d))) return false;
                    q += d;
                    if (!inside(q)) return false;
                    if (std::abs(d) < tol) {
                        v = f(q);
                        cands[idx].push_back({q, v});
                        return true;
                    }
                }
                return false;
            };
            if (!two_d) {
                const auto along = [&](double s) { return f({s, p.imag()}); };
                double v;
                const bool hit = newton(p, v);
                for (double off : {-0.5 * dre, 0.5 * dre}) newton(p + off, v);
                if (!hit) {
                    const double x = golden(along, lo_re, hi_re, tol, val);
                    cands[idx].push_back({{x, p.imag()}, val});
                }
            } else {
                double v;
                if (!newton(p, v)) {
                    for (int sweep = 0; sweep < 4; ++sweep) {
                        const double wr = sweep == 0 ? dre : dre / std::pow(4.0, sweep);
                        const double wi = sweep == 0 ? dim : dim / std::pow(4.0, sweep);
                        const double x = golden([&](double s) { return f({s, p.imag()}); }, p.real() - wr,
                                                p.real() + wr, tol, v);
                        p = {x, p.imag()};
                        const double y = golden([&](double s) { return f({p.real(), s}); }, p.imag() - wi,
                                                p.imag() + wi, tol, val);
                        p = {p.real(), y};
                    }
                    cands[idx].push_back({p, val});
                }
            }
        },
        opt.bloch.threads);

    std::ostringstream diag;
    std::vector<BlochPoint> pts_ok;
    int rejected = 0;
    for (const auto &list : cands)
        for (const auto &[p, val] : list) {
            if (!(val < opt.threshold)) {
                ++rejected;
                continue;
            }
            BlochPoint bp;
            bp.w1 = w1;
            bp.p1 = res.p1;
            bp.p2 = p;
            bp.w2 = std::exp(kI * p * std::abs(g.tau()));
            bp.branch2 = branch_of(p.real() - (-kI * std::log(bp.w2) / std::abs(g.tau())).real(), period2);
            bp.residual = val;
            pts_ok.push_back(bp);
        }
    std::sort(pts_ok.begin(), pts_ok.end(), [](const BlochPoint &a, const BlochPoint &b) { return a.residual < b.residual; });
    for (const auto &p : pts_ok) {
        const bool dup = std::any_of(res.points.begin(), res.points.end(), [&](const BlochPoint &q) {
            return std::abs(q.w2 - p.w2) < 1e-8 * std::max(1.0, std::abs(p.w2));
        });
        if (!dup) res.points.push_back(p);
    }
    if (static_cast<int>(res.points.size()) > win.max_count) {
        diag << "kept the " << win.max_count << " best of " << res.points.size() << " roots; ";
        res.points.resize(win.max_count);
    }
    std::sort(res.points.begin(), res.points.end(), [](const BlochPoint &a, const BlochPoint &b) {
        return a.p2.real() != b.p2.real() ? a.p2.real() < b.p2.real() : a.p2.imag() < b.p2.imag();
    });
    diag << minima.size() << " local minima, " << rejected << " above threshold " << opt.threshold << ", M = " << res.M;
    if (res.points.empty()) diag << "; no roots in window";
    res.diagnostics = diag.str();
    return res;
}

std::vector<std::array<cplx, 2>> resonant_pairs(cplx tau, int mmax, int nmax) {
    if (!(tau.imag() > 0.0)) throw Error(ErrorCode::NonPositiveImaginaryModulus, "Im tau must be positive");
    if (mmax < 0 || nmax < 0) throw Error(ErrorCode::InvalidArgument, "mmax and nmax must be nonnegative");
    const double pi = std::numbers::pi;
    std::vector<std::array<cplx, 2>> out;
    for (int m = -mmax; m <= mmax; ++m)
        for (int n = -nmax; n <= nmax; ++n) {
            const cplx l1((pi * m * tau.real() - pi * n) / tau.imag(), pi * m);
            out.push_back({l1, std::conj(l1)});
        }
    return out;
}

} // namespace wmnv
