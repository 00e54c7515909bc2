#include "weiermnv/immersion.hpp"

#include "weiermnv/errors.hpp"
#include "weiermnv/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace wmnv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int next_pow2(int n) {
    int p = 1;
    while (p < n) p *= 2;
    return p;
}

// Complex coefficients c_k, k = -d..d, of uniform real samples; the Nyquist bin
// is split evenly between +-N/2 so the interpolant stays real.
std::vector<cplx> samples_to_coeffs(const std::vector<double> &v, int degree) {
    const int n = static_cast<int>(v.size());
    std::vector<cplx> in(v.begin(), v.end()), out(n);
    fft::forward_1d(n, in, out);
    std::vector<cplx> c(2 * degree + 1);
    for (int i = 0; i < n; ++i) {
        const int k = fft::frequency(i, n);
        if (2 * std::abs(k) == n) {
            c[degree + k] += out[i] / (2.0 * n);
            c[degree - k] += out[i] / (2.0 * n);
        } else {
            c[degree + k] = out[i] / static_cast<double>(n);
        }
    }
    return c;
}

std::vector<cplx> real_fourier_to_coeffs(const std::vector<std::pair<double, double>> &ab, int degree) {
    std::vector<cplx> c(2 * degree + 1);
    for (std::size_t k = 0; k < ab.size(); ++k) {
        const auto [a, b] = ab[k];
        if (k == 0) {
            c[degree] = a;
            continue;
        }
        c[degree + k] = cplx{a, -b} / 2.0;
        c[degree - k] = cplx{a, b} / 2.0;
    }
    return c;
}

} // namespace

ProfileCurve ProfileCurve::from_samples(const std::vector<double> &r, const std::vector<double> &h) {
    if (r.size() != h.size()) throw Error(ErrorCode::InvalidArgument, "profile r and h sample counts differ");
    std::vector<double> rr = r, hh = h;
    if (rr.size() > 1) {
        double scale = 0.0;
        for (std::size_t i = 0; i < rr.size(); ++i) scale = std::max({scale, std::abs(rr[i]), std::abs(hh[i])});
        if (std::abs(rr.front() - rr.back()) <= 1e-12 * scale && std::abs(hh.front() - hh.back()) <= 1e-12 * scale) {
            rr.pop_back();
            hh.pop_back();
        }
    }
    if (rr.size() < 3) throw Error(ErrorCode::DegenerateProfile, "profile needs at least 3 distinct samples");
    ProfileCurve p;
    p.degree_ = static_cast<int>(rr.size()) / 2;
    p.r_coeffs_ = samples_to_coeffs(rr, p.degree_);
    p.h_coeffs_ = samples_to_coeffs(hh, p.degree_);
    return p;
}

ProfileCurve ProfileCurve::from_fourier(const std::vector<std::pair<double, double>> &r_coeffs,
                                        const std::vector<std::pair<double, double>> &h_coeffs) {
    const int degree = static_cast<int>(std::max(r_coeffs.size(), h_coeffs.size())) - 1;
    if (degree < 1) throw Error(ErrorCode::DegenerateProfile, "profile needs at least one harmonic");
    ProfileCurve p;
    p.degree_ = degree;
    p.r_coeffs_ = real_fourier_to_coeffs(r_coeffs, degree);
    p.h_coeffs_ = real_fourier_to_coeffs(h_coeffs, degree);
    return p;
}

ProfileCurve ProfileCurve::torus(double center, double tube) {
    return from_fourier({{center, 0.0}, {tube, 0.0}}, {{0.0, 0.0}, {0.0, tube}});
}

double ProfileCurve::eval(const std::vector<cplx> &c, double s, bool derivative) const {
    cplx acc{};
    for (int k = -degree_; k <= degree_; ++k) {
        cplx term = c[k + degree_] * std::polar(1.0, k * s);
        if (derivative) term *= cplx{0.0, static_cast<double>(k)};
        acc += term;
    }
    return acc.real();
}

double ProfileCurve::r(double s) const { return eval(r_coeffs_, s, false); }
double ProfileCurve::h(double s) const { return eval(h_coeffs_, s, false); }
double ProfileCurve::dr(double s) const { return eval(r_coeffs_, s, true); }
double ProfileCurve::dh(double s) const { return eval(h_coeffs_, s, true); }

int ProfileCurve::orientation() const {
    // Signed area: integral of r dh = 2π Σ_k c^r_{-k} (ik) c^h_k.
    cplx area{};
    for (int k = -degree_; k <= degree_; ++k)
        area += r_coeffs_[degree_ - k] * cplx{0.0, static_cast<double>(k)} * h_coeffs_[degree_ + k];
    return area.real() >= 0.0 ? 1 : -1;
}

ProfileCurve ProfileCurve::scaled(double k) const {
    ProfileCurve p = *this;
    for (auto &c : p.r_coeffs_) c *= k;
    for (auto &c : p.h_coeffs_) c *= k;
    return p;
}

Immersion::Immersion(const TorusGrid &grid, std::vector<Vec3> points)
    : grid_(grid), points_(std::move(points)), conformality_residual_(0.0) {
    if (points_.size() != grid_.size()) throw Error(ErrorCode::GridMismatch, "point count does not match nx*ny");
    conformality_residual_ = wmnv::conformality_residual(grid_, points_);
}

ScalarField Immersion::component(int i) const {
    ScalarField f(grid_);
    for (std::size_t n = 0; n < points_.size(); ++n) f[n] = points_[n][i];
    return f;
}

double Immersion::max_cell_diameter() const {
    const int nx = grid_.nx(), ny = grid_.ny();
    double d = 0.0;
    for (int k = 0; k < ny; ++k)
        for (int j = 0; j < nx; ++j) {
            const Vec3 &p = point(j, k);
            const int j1 = (j + 1) % nx, k1 = (k + 1) % ny, km = (k + ny - 1) % ny;
            d = std::max({d, (point(j1, k) - p).norm(), (point(j, k1) - p).norm(), (point(j1, k1) - p).norm(),
                          (point(j1, km) - p).norm()});
        }
    return d;
}

double conformality_residual(const TorusGrid &grid, const std::vector<Vec3> &points) {
    std::vector<ScalarField> xz;
    for (int i = 0; i < 3; ++i) {
        ScalarField c(grid);
        for (std::size_t n = 0; n < points.size(); ++n) c[n] = points[n][i];
        xz.push_back(d_z(c));
    }
    double worst = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        cplx num{};
        double den = 0.0;
        for (int i = 0; i < 3; ++i) {
            num += xz[i][n] * xz[i][n];
            den += std::norm(xz[i][n]);
        }
        if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(num) / den);
    }
    return worst;
}

std::vector<double> FundamentalForms::mean_curvature() const {
    std::vector<double> h(E.size());
    for (std::size_t n = 0; n < h.size(); ++n)
        h[n] = (E[n] * N[n] - 2.0 * F[n] * M[n] + G[n] * L[n]) / (2.0 * (E[n] * G[n] - F[n] * F[n]));
    return h;
}

std::vector<double> FundamentalForms::area_element() const {
    std::vector<double> a(E.size());
    for (std::size_t n = 0; n < a.size(); ++n) a[n] = std::sqrt(E[n] * G[n] - F[n] * F[n]);
    return a;
}

RevolutionTorus revolve_detailed(const ProfileCurve &profile, int ny, int nx_hint) {
    if (ny < 4 || ny % 2 != 0 || nx_hint < 4 || nx_hint % 2 != 0) {
        std::ostringstream msg;
        msg << "nx, ny must be even and >= 4, got " << nx_hint << "x" << ny;
        throw Error(ErrorCode::BadResolution, msg.str());
    }
    const int nx = nx_hint;

    // Spectral coefficients of g = |γ'| / r on the profile's own parameter,
    // refined until the top quarter of the band is negligible.
    int ns = next_pow2(std::max({256, 4 * nx, 8 * profile.degree()}));
    std::vector<cplx> ghat;
    double arc = 0.0;
    for (;;) {
        std::vector<cplx> g(ns);
        double speed_sum = 0.0, scale = 0.0;
        for (int i = 0; i < ns; ++i) {
            const double s = kTwoPi * i / ns;
            const double r = profile.r(s);
            const double speed = std::hypot(profile.dr(s), profile.dh(s));
            scale = std::max({scale, std::abs(r), std::abs(profile.h(s))});
            if (!(r > 0.0)) {
                std::ostringstream msg;
                msg << "profile reaches the axis: r(" << s << ") = " << r;
                throw Error(ErrorCode::DegenerateProfile, msg.str());
            }
            speed_sum += speed;
            g[i] = speed / r;
        }
        arc = kTwoPi * speed_sum / ns;
        if (!(arc > 1e-14 * scale)) throw Error(ErrorCode::DegenerateProfile, "profile has zero arc length");
        ghat.assign(ns, {});
        fft::forward_1d(ns, g, ghat);
        for (auto &c : ghat) c /= static_cast<double>(ns);
        double tail = 0.0;
        for (int i = 0; i < ns; ++i)
            if (4 * std::abs(fft::frequency(i, ns)) > ns) tail = std::max(tail, std::abs(ghat[i]));
        if (tail < 1e-15 * std::abs(ghat[0]) || ns >= (1 << 18)) break;
        ns *= 2;
    }

    const double mean_g = ghat[0].real();
    const double length = kTwoPi * mean_g;
    // x(s) = mean_g s + periodic antiderivative; keep only significant modes.
    std::vector<std::pair<int, cplx>> modes;
    for (int i = 1; i < ns; ++i) {
        const int k = fft::frequency(i, ns);
        if (2 * std::abs(k) == ns) continue;
        if (std::abs(ghat[i]) > 1e-18 * mean_g) modes.emplace_back(k, ghat[i] / cplx{0.0, static_cast<double>(k)});
    }
    const auto periodic = [&](double s) {
        cplx acc{};
        for (const auto &[k, c] : modes) acc += c * std::polar(1.0, k * s);
        return acc.real();
    };
    const double x0 = periodic(0.0);
    const auto x_of = [&](double s) { return mean_g * s + periodic(s) - x0; };
    const auto g_of = [&](double s) { return std::hypot(profile.dr(s), profile.dh(s)) / profile.r(s); };

    // Solve x(s_j) = j L / nx by safeguarded Newton on the monotone map.
    std::vector<double> s_nodes(nx);
    double lo_prev = 0.0;
    for (int j = 0; j < nx; ++j) {
        const double target = length * j / nx;
        double lo = lo_prev, hi = kTwoPi;
        double s = std::clamp(target / mean_g, lo, hi);
        for (int it = 0; it < 100; ++it) {
            const double f = x_of(s) - target;
            if (f == 0.0) break;
            if (f > 0.0) hi = std::min(hi, s);
            else lo = std::max(lo, s);
            const double d = g_of(s);
            double next = d > 0.0 ? s - f / d : 0.5 * (lo + hi);
            if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
            const double step = std::abs(next - s);
            s = next;
            if (step < 1e-15 * kTwoPi || hi - lo < 1e-15) break;
        }
        s_nodes[j] = s;
        lo_prev = s;
    }

    const TorusGrid grid = TorusGrid::make(cplx{0.0, kTwoPi / length}, nx, ny);
    std::vector<Vec3> pts(grid.size());
    for (int j = 0; j < nx; ++j) {
        const double r = profile.r(s_nodes[j]), h = profile.h(s_nodes[j]);
        for (int k = 0; k < ny; ++k) {
            const double th = kTwoPi * k / ny;
            pts[grid.index(j, k)] = Vec3(r * std::cos(th), r * std::sin(th), h);
        }
    }
    return {Immersion(grid, std::move(pts)), std::move(s_nodes), length};
}

Immersion revolve(const ProfileCurve &profile, int ny, int nx_hint) {
    return revolve_detailed(profile, ny, nx_hint).immersion;
}

FundamentalForms fundamental_forms(const Immersion &X) {
    const TorusGrid &g = X.grid();
    const double a = g.tau().real(), b = g.tau().imag();
    const std::size_t n = g.size();

    std::vector<Vec3> xx(n), xy(n), xxx(n), xxy(n), xyy(n);
    for (int i = 0; i < 3; ++i) {
        const Spectrum sp(X.component(i));
        const auto d10 = sp.derivative(1, 0), d01 = sp.derivative(0, 1);
        const auto d20 = sp.derivative(2, 0), d11 = sp.derivative(1, 1), d02 = sp.derivative(0, 2);
        for (std::size_t m = 0; m < n; ++m) {
            const double t1 = d10[m].real(), t2 = d01[m].real();
            const double t11 = d20[m].real(), t12 = d11[m].real(), t22 = d02[m].real();
            xx[m][i] = t1;
            xy[m][i] = (t2 - a * t1) / b;
            xxx[m][i] = t11;
            xxy[m][i] = (t12 - a * t11) / b;
            xyy[m][i] = (t22 - 2.0 * a * t12 + a * a * t11) / (b * b);
        }
    }

    FundamentalForms f;
    f.E.resize(n), f.F.resize(n), f.G.resize(n), f.L.resize(n), f.M.resize(n), f.N.resize(n), f.normal.resize(n);
    double max_e = 0.0, max_g = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        f.E[m] = xx[m].squaredNorm();
        f.F[m] = xx[m].dot(xy[m]);
        f.G[m] = xy[m].squaredNorm();
        max_e = std::max(max_e, f.E[m]);
        max_g = std::max(max_g, f.G[m]);
    }
    const double floor = 1e-12 * max_e * max_g;
    for (std::size_t m = 0; m < n; ++m) {
        const double det = f.E[m] * f.G[m] - f.F[m] * f.F[m];
        if (!(det > floor)) {
            std::ostringstream msg;
            msg << "EG - F^2 = " << det << " at node " << m;
            throw Error(ErrorCode::DegenerateImmersion, msg.str());
        }
        const Vec3 nrm = xx[m].cross(xy[m]).normalized();
        f.normal[m] = nrm;
        f.L[m] = xxx[m].dot(nrm);
        f.M[m] = xxy[m].dot(nrm);
        f.N[m] = xyy[m].dot(nrm);
    }
    return f;
}

double willmore(const Immersion &X) {
    const auto forms = fundamental_forms(X);
    const auto h = forms.mean_curvature();
    const auto da = forms.area_element();
    double acc = 0.0;
    for (std::size_t m = 0; m < h.size(); ++m) acc += h[m] * h[m] * da[m];
    return X.grid().tau().imag() * acc / static_cast<double>(h.size());
}

ScalarField conformal_factor(const Immersion &X, const FundamentalForms &forms, double max_residual) {
    if (!(X.conformality_residual() <= max_residual)) {
        std::ostringstream msg;
        msg << "conformality residual " << X.conformality_residual() << " exceeds " << max_residual;
        throw Error(ErrorCode::NotConformal, msg.str());
    }
    ScalarField out(X.grid());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::sqrt(0.5 * (forms.E[m] + forms.G[m]));
    return out;
}

ScalarField conformal_factor(const Immersion &X, double max_residual) {
    if (!(X.conformality_residual() <= max_residual)) return conformal_factor(X, FundamentalForms{}, max_residual);
    return conformal_factor(X, fundamental_forms(X), max_residual);
}

} // namespace wmnv
