#pragma once

#include "weiermnv/immersion.hpp"
#include "weiermnv/invariants.hpp"
#include "weiermnv/weierstrass.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace wmnv {

struct Translation {
    Vec3 v;
};
struct Rotation {
    Eigen::Matrix3d A;
};
struct Dilation {
    double k;
};
/// X -> (X - center) / |X - center|^2.
struct Inversion {
    Vec3 center;
};
/// X -> X - 2 v <v, X>, |v| = 1.
struct Reflection {
    Vec3 v;
};
/// X -> (X - b|X|^2) / (1 - 2<b, X> + |b|^2 |X|^2): inversion, translation by b,
/// inversion. b = -ε e3 is the time-ε map of the generator -K_3.
struct SpecialConformal {
    Vec3 b;
};

using ConformalStep = std::variant<Translation, Rotation, Dilation, Inversion, Reflection, SpecialConformal>;

/// Ordered chain of steps, applied first to last. Empty means identity.
class ConformalTransform {
public:
    ConformalTransform() = default;
    /// Validates the step (rotation orthogonal with det +1 to 1e-12, k > 0, |v| = 1).
    explicit ConformalTransform(ConformalStep step);

    static ConformalTransform translation(const Vec3 &v);
    static ConformalTransform rotation(const Eigen::Matrix3d &A);
    static ConformalTransform rotation(const Vec3 &axis, double angle);
    static ConformalTransform dilation(double k);
    static ConformalTransform inversion(const Vec3 &center);
    static ConformalTransform reflection(const Vec3 &v);
    static ConformalTransform special_conformal(const Vec3 &b);

    const std::vector<ConformalStep> &steps() const noexcept { return steps_; }
    Vec3 map(const Vec3 &p) const;
    /// Pointwise metric factor Λ(p): ds'^2 = Λ^2 ds^2.
    double scale(const Vec3 &p) const;
    /// Same grammar parse_transform accepts.
    std::string describe() const;

    friend ConformalTransform compose(const ConformalTransform &first, const ConformalTransform &second);

private:
    std::vector<ConformalStep> steps_;
};

/// `first`, then `second`.
ConformalTransform compose(const ConformalTransform &first, const ConformalTransform &second);

/// "kind:args" items joined by ';', e.g. "inversion:0,0,5;dilation:2". Kinds:
/// identity, translation:x,y,z, rotation:ax,ay,az,angle, dilation:k,
/// inversion:cx,cy,cz, reflection:vx,vy,vz (normalized), special:bx,by,bz.
/// Throws InvalidArgument.
ConformalTransform parse_transform(const std::string &text);

struct ApplyOptions {
    /// Singular points must stay this many cell diameters away from the surface.
    double safety_cells = 5.0;
};

/// Node-wise image on the same lattice. Throws CenterOnSurface.
Immersion apply(const ConformalTransform &t, const Immersion &X, const ApplyOptions &opt = {});

/// Λ at p. Throws CenterOnSurface if p is a singular point of the chain.
double conformal_scale(const ConformalTransform &t, const Vec3 &p);

enum class GeneratorKind { Translation, Rotation, Dilation, Inversion };

/// P_a, Ω_ab (a < b), D, K_a with 1-based a, b.
struct GeneratorAction {
    GeneratorKind kind;
    int a = 1;
    int b = 2;
};

/// δX node-wise. Throws InvalidArgument on bad indices.
std::vector<Vec3> infinitesimal_deform(const GeneratorAction &g, const Immersion &X);

/// Deformation of the Weierstrass data of X under -K_3 (X taken as the image
/// itself, so the integration constants are those of X).
struct PotentialDeformation {
    ScalarField U;
    SpinorField psi;
    /// |Ψ1|^2 - |Ψ2|^2.
    ScalarField delta_U;
    /// δΨ1 = -X3 Ψ1 + i W conj(Ψ2), δΨ2 = -X3 Ψ2 - i W conj(Ψ1), W = X1 - i X2.
    SpinorField delta_psi;
    double linearized_residual;
};

PotentialDeformation deform_potential_analytic(const Immersion &X, const RecoveryOptions &opt = {});

/// Relative residual of the linearized system
///   d_z δΨ1 - δU Ψ2 - U δΨ2 = 0,  d_zbar δΨ2 + δU Ψ1 + U δΨ1 = 0.
double linearized_dirac_residual(const ScalarField &U, const SpinorField &psi, const ScalarField &dU,
                                 const SpinorField &dpsi);

/// rel_diff = abs_diff / max(|before|, |h_1|^{(k+1)/2}); h_k scales like U^{k+1},
/// and h_3, h_5 vanish on round tori.
struct InvarianceRow {
    int k;
    cplx before;
    cplx after;
    double abs_diff;
    double rel_diff;
};

struct InvarianceReport {
    std::string transform;
    std::uint64_t seed = 0;
    int K = 0;
    int nx = 0;
    int ny = 0;
    cplx tau{};
    std::vector<InvarianceRow> rows;
    double willmore_before = 0.0;
    double willmore_after = 0.0;
    double willmore_rel_diff = 0.0;
    double conformality_after = 0.0;
    bool resolution_warning = false;

    /// Largest rel_diff over odd k.
    double max_odd_rel_diff() const;
};

struct InvarianceOptions {
    ApplyOptions apply;
    double conformal_tolerance = 1e-6;
};

/// Recomputes U for X and for apply(t, X) through forms -> H -> e^α -> U and
/// compares h_1..h_K and the Willmore energy.
InvarianceReport invariance_report(const Immersion &X, const ConformalTransform &t, int K,
                                   const InvarianceOptions &opt = {});

enum class TransformKind { Translation, Rotation, Dilation, Inversion, Reflection };

/// Random member of one family. Inversion centers are drawn at distance from
/// the surface between max(min_center_distance, safety cells) and
/// max_center_distance (both in length units).
struct RandomTransformOptions {
    double min_center_distance = 1.0;
    double max_center_distance = 3.0;
    double safety_cells = 5.0;
};

ConformalTransform random_transform(TransformKind kind, std::mt19937_64 &rng, const Immersion &X,
                                    const RandomTransformOptions &opt = {});

} // namespace wmnv
