#include "weiermnv/conformal.hpp"

#include "weiermnv/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace wmnv {

namespace {

constexpr cplx kI{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Vec3 map_step(const ConformalStep &s, const Vec3 &p) {
    return std::visit(overloaded{
                          [&](const Translation &t) -> Vec3 { return p + t.v; },
                          [&](const Rotation &r) -> Vec3 { return r.A * p; },
                          [&](const Dilation &d) -> Vec3 { return d.k * p; },
                          [&](const Inversion &i) -> Vec3 {
                              const Vec3 q = p - i.center;
                              return q / q.squaredNorm();
                          },
                          [&](const Reflection &r) -> Vec3 { return p - 2.0 * r.v * r.v.dot(p); },
                          [&](const SpecialConformal &s) -> Vec3 {
                              const double x2 = p.squaredNorm();
                              return (p - s.b * x2) / (1.0 - 2.0 * s.b.dot(p) + s.b.squaredNorm() * x2);
                          },
                      },
                      s);
}

double scale_step(const ConformalStep &s, const Vec3 &p) {
    return std::visit(overloaded{
                          [&](const Dilation &d) { return d.k; },
                          [&](const Inversion &i) { return 1.0 / (p - i.center).squaredNorm(); },
                          [&](const SpecialConformal &s) {
                              return 1.0 / (1.0 - 2.0 * s.b.dot(p) + s.b.squaredNorm() * p.squaredNorm());
                          },
                          [](const auto &) { return 1.0; },
                      },
                      s);
}

// Point sent to infinity by the step, if any.
bool singular_point(const ConformalStep &s, Vec3 &pole) {
    if (const auto *i = std::get_if<Inversion>(&s)) {
        pole = i->center;
        return true;
    }
    if (const auto *c = std::get_if<SpecialConformal>(&s); c && c->b.squaredNorm() > 0.0) {
        pole = c->b / c->b.squaredNorm();
        return true;
    }
    return false;
}

std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_vec(const Vec3 &v) { return fmt_num(v[0]) + "," + fmt_num(v[1]) + "," + fmt_num(v[2]); }

std::vector<double> parse_numbers(const std::string &args, std::size_t count, const std::string &item) {
    std::vector<double> out;
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used == 0 || used != tok.size() || !std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "bad number '" + tok + "' in transform item '" + item + "'");
        out.push_back(v);
    }
    if (out.size() != count)
        throw Error(ErrorCode::InvalidArgument, "transform item '" + item + "' expects " + std::to_string(count) +
                                                    " numbers");
    return out;
}

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\n");
    return s.substr(b, e - b + 1);
}

Vec3 random_unit(std::mt19937_64 &rng) {
    std::normal_distribution<double> d;
    Vec3 v;
    do v = Vec3(d(rng), d(rng), d(rng));
    while (v.norm() < 1e-3);
    return v.normalized();
}

double min_distance(const std::vector<Vec3> &pts, const Vec3 &c) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto &p : pts) d = std::min(d, (p - c).norm());
    return d;
}

} // namespace

ConformalTransform::ConformalTransform(ConformalStep step) {
    if (const auto *r = std::get_if<Rotation>(&step)) {
        const double orth = (r->A.transpose() * r->A - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
        if (orth > 1e-12 || std::abs(r->A.determinant() - 1.0) > 1e-12)
            throw Error(ErrorCode::InvalidArgument, "rotation matrix must be orthogonal with determinant +1");
    } else if (const auto *d = std::get_if<Dilation>(&step)) {
        if (!(d->k > 0.0) || !std::isfinite(d->k)) throw Error(ErrorCode::InvalidArgument, "dilation factor must be positive");
    } else if (const auto *f = std::get_if<Reflection>(&step)) {
        if (std::abs(f->v.norm() - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "reflection vector must be unit");
    }
    steps_.push_back(std::move(step));
}

ConformalTransform ConformalTransform::translation(const Vec3 &v) { return ConformalTransform(Translation{v}); }
ConformalTransform ConformalTransform::rotation(const Eigen::Matrix3d &A) { return ConformalTransform(Rotation{A}); }
ConformalTransform ConformalTransform::rotation(const Vec3 &axis, double angle) {
    if (!(axis.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "rotation axis must be nonzero");
    return ConformalTransform(Rotation{Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix()});
}
ConformalTransform ConformalTransform::dilation(double k) { return ConformalTransform(Dilation{k}); }
ConformalTransform ConformalTransform::inversion(const Vec3 &c) { return ConformalTransform(Inversion{c}); }
ConformalTransform ConformalTransform::reflection(const Vec3 &v) { return ConformalTransform(Reflection{v}); }
ConformalTransform ConformalTransform::special_conformal(const Vec3 &b) {
    return ConformalTransform(SpecialConformal{b});
}

Vec3 ConformalTransform::map(const Vec3 &p) const {
    Vec3 q = p;
    for (const auto &s : steps_) q = map_step(s, q);
    return q;
}

double ConformalTransform::scale(const Vec3 &p) const { return conformal_scale(*this, p); }

std::string ConformalTransform::describe() const {
    if (steps_.empty()) return "identity";
    std::string out;
    for (const auto &s : steps_) {
        if (!out.empty()) out += ';';
        out += std::visit(overloaded{
                              [](const Translation &t) { return "translation:" + fmt_vec(t.v); },
                              [](const Rotation &r) {
                                  const Eigen::AngleAxisd aa(r.A);
                                  return "rotation:" + fmt_vec(aa.axis()) + "," + fmt_num(aa.angle());
                              },
                              [](const Dilation &d) { return "dilation:" + fmt_num(d.k); },
                              [](const Inversion &i) { return "inversion:" + fmt_vec(i.center); },
                              [](const Reflection &r) { return "reflection:" + fmt_vec(r.v); },
                              [](const SpecialConformal &c) { return "special:" + fmt_vec(c.b); },
                          },
                          s);
    }
    return out;
}

ConformalTransform compose(const ConformalTransform &first, const ConformalTransform &second) {
    ConformalTransform t = first;
    t.steps_.insert(t.steps_.end(), second.steps_.begin(), second.steps_.end());
    return t;
}

ConformalTransform parse_transform(const std::string &text) {
    ConformalTransform t;
    std::stringstream ss(text);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        any = true;
        const auto colon = item.find(':');
        const std::string kind = trim(item.substr(0, colon));
        const std::string args = colon == std::string::npos ? "" : item.substr(colon + 1);
        if (kind == "identity") {
            if (!trim(args).empty()) throw Error(ErrorCode::InvalidArgument, "identity takes no arguments");
            continue;
        }
        if (colon == std::string::npos)
            throw Error(ErrorCode::InvalidArgument, "transform item '" + item + "' lacks ':'");
        ConformalTransform step;
        if (kind == "translation") {
            const auto v = parse_numbers(args, 3, item);
            step = ConformalTransform::translation(Vec3(v[0], v[1], v[2]));
        } else if (kind == "rotation") {
            const auto v = parse_numbers(args, 4, item);
            step = ConformalTransform::rotation(Vec3(v[0], v[1], v[2]), v[3]);
        } else if (kind == "dilation") {
            step = ConformalTransform::dilation(parse_numbers(args, 1, item)[0]);
        } else if (kind == "inversion") {
            const auto v = parse_numbers(args, 3, item);
            step = ConformalTransform::inversion(Vec3(v[0], v[1], v[2]));
        } else if (kind == "reflection") {
            const auto v = parse_numbers(args, 3, item);
            const Vec3 n(v[0], v[1], v[2]);
            if (!(n.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "reflection vector must be nonzero");
            step = ConformalTransform::reflection(n.normalized());
        } else if (kind == "special") {
            const auto v = parse_numbers(args, 3, item);
            step = ConformalTransform::special_conformal(Vec3(v[0], v[1], v[2]));
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown transform kind '" + kind + "'");
        }
        t = compose(t, step);
    }
    if (!any) throw Error(ErrorCode::InvalidArgument, "empty transform specification");
    return t;
}

Immersion apply(const ConformalTransform &t, const Immersion &X, const ApplyOptions &opt) {
    std::vector<Vec3> pts = X.points();
    for (const auto &s : t.steps()) {
        Vec3 pole;
        if (singular_point(s, pole)) {
            const double cell = Immersion(X.grid(), pts).max_cell_diameter();
            const double d = min_distance(pts, pole);
            if (!(d > opt.safety_cells * cell)) {
                std::ostringstream msg;
                msg << "singular point (" << pole.transpose() << ") lies " << d << " from the surface; need more than "
                    << opt.safety_cells << " cell diameters = " << opt.safety_cells * cell;
                throw Error(ErrorCode::CenterOnSurface, msg.str());
            }
        }
        for (auto &p : pts) p = map_step(s, p);
    }
    return Immersion(X.grid(), std::move(pts));
}

double conformal_scale(const ConformalTransform &t, const Vec3 &p) {
    Vec3 q = p;
    double lambda = 1.0;
    for (const auto &s : t.steps()) {
        Vec3 pole;
        if (singular_point(s, pole) && (q - pole).norm() == 0.0)
            throw Error(ErrorCode::CenterOnSurface, "point coincides with a singular point of the transform");
        lambda *= scale_step(s, q);
        q = map_step(s, q);
    }
    return lambda;
}

std::vector<Vec3> infinitesimal_deform(const GeneratorAction &g, const Immersion &X) {
    const auto valid = [](int i) { return i >= 1 && i <= 3; };
    if (!valid(g.a) || (g.kind == GeneratorKind::Rotation && (!valid(g.b) || g.a >= g.b)))
        throw Error(ErrorCode::InvalidArgument, "generator indices must lie in 1..3 (a < b for rotations)");
    const int a = g.a - 1, b = g.b - 1;
    std::vector<Vec3> out;
    out.reserve(X.points().size());
    for (const auto &p : X.points()) {
        Vec3 d = Vec3::Zero();
        switch (g.kind) {
        case GeneratorKind::Translation: d[a] = 1.0; break;
        case GeneratorKind::Rotation:
            d[b] = p[a];
            d[a] = -p[b];
            break;
        case GeneratorKind::Dilation: d = p; break;
        case GeneratorKind::Inversion:
            d = 2.0 * p[a] * p;
            d[a] -= p.squaredNorm();
            break;
        }
        out.push_back(d);
    }
    return out;
}

double linearized_dirac_residual(const ScalarField &U, const SpinorField &psi, const ScalarField &dU,
                                 const SpinorField &dpsi) {
    const Twist tw = psi.twist();
    const auto d1z = d_z(dpsi.psi1, tw);
    const auto d2zb = d_zbar(dpsi.psi2, tw);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) {
        const cplx a = dU[i] * psi.psi2[i], b = U[i] * dpsi.psi2[i];
        const cplx c = dU[i] * psi.psi1[i], e = U[i] * dpsi.psi1[i];
        worst = std::max(worst, std::abs(d1z[i] - a - b) + std::abs(d2zb[i] + c + e));
        scale = std::max({scale, std::abs(d1z[i]), std::abs(d2zb[i]), std::abs(a), std::abs(b), std::abs(c),
                          std::abs(e)});
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

PotentialDeformation deform_potential_analytic(const Immersion &X, const RecoveryOptions &opt) {
    SpinorField psi = recover_spinor(X, opt);
    ScalarField U = extract_potential(X, opt.conformal_tolerance);
    ScalarField dU = psi.psi1.abs2() - psi.psi2.abs2();
    const ScalarField x3 = X.component(2);
    const ScalarField w = X.component(0) - kI * X.component(1);
    SpinorField dpsi(-(x3 * psi.psi1) + kI * (w * psi.psi2.conj()), -(x3 * psi.psi2) - kI * (w * psi.psi1.conj()),
                     psi.mult1, psi.mult2);
    const double res = linearized_dirac_residual(U, psi, dU, dpsi);
    return {std::move(U), std::move(psi), std::move(dU), std::move(dpsi), res};
}

double InvarianceReport::max_odd_rel_diff() const {
    double m = 0.0;
    for (const auto &r : rows)
        if (r.k % 2 == 1) m = std::max(m, r.rel_diff);
    return m;
}

InvarianceReport invariance_report(const Immersion &X, const ConformalTransform &t, int K,
                                   const InvarianceOptions &opt) {
    const Immersion Y = apply(t, X, opt.apply);
    const auto before = mnv_recursion(extract_potential(X, opt.conformal_tolerance), K).invariants;
    const auto after = mnv_recursion(extract_potential(Y, opt.conformal_tolerance), K).invariants;

    InvarianceReport rep;
    rep.transform = t.describe();
    rep.K = K;
    rep.nx = X.grid().nx();
    rep.ny = X.grid().ny();
    rep.tau = X.grid().tau();
    for (int k = 1; k <= K; ++k) {
        const double ad = std::abs(after[k] - before[k]);
        const double mag = std::max(std::abs(before[k]), std::pow(std::abs(before[1]), 0.5 * (k + 1)));
        rep.rows.push_back({k, before[k], after[k], ad, mag > 0.0 ? ad / mag : ad});
    }
    rep.willmore_before = willmore(X);
    rep.willmore_after = willmore(Y);
    rep.willmore_rel_diff = std::abs(rep.willmore_after - rep.willmore_before) / std::abs(rep.willmore_before);
    rep.conformality_after = Y.conformality_residual();
    rep.resolution_warning = before.resolution_warning || after.resolution_warning;
    return rep;
}

ConformalTransform random_transform(TransformKind kind, std::mt19937_64 &rng, const Immersion &X,
                                    const RandomTransformOptions &opt) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss;
    switch (kind) {
    case TransformKind::Translation: return ConformalTransform::translation(2.0 * Vec3(gauss(rng), gauss(rng), gauss(rng)));
    case TransformKind::Rotation:
        return ConformalTransform::rotation(random_unit(rng), 2.0 * std::numbers::pi * uni(rng));
    case TransformKind::Dilation: return ConformalTransform::dilation(std::exp(-1.0 + 2.2 * uni(rng)));
    case TransformKind::Reflection: return ConformalTransform::reflection(random_unit(rng));
    case TransformKind::Inversion: {
        Vec3 lo = X.points().front(), hi = lo;
        for (const auto &p : X.points()) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
        lo.array() -= opt.max_center_distance;
        hi.array() += opt.max_center_distance;
        const double dmin = std::max(opt.min_center_distance, opt.safety_cells * X.max_cell_diameter());
        for (int attempt = 0; attempt < 100000; ++attempt) {
            Vec3 c;
            for (int i = 0; i < 3; ++i) c[i] = lo[i] + (hi[i] - lo[i]) * uni(rng);
            const double d = min_distance(X.points(), c);
            if (d > dmin && d <= opt.max_center_distance) return ConformalTransform::inversion(c);
        }
        throw Error(ErrorCode::InvalidArgument, "could not place an inversion center in the requested distance band");
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown transform kind");
}

} // namespace wmnv
