#pragma once

// Text formats. Complex numbers are [re, im] pairs; grid values are row-major
// in (k, j) like the in-memory layout. "-" as a path means stdin/stdout.

#include "weiermnv/bloch.hpp"
#include "weiermnv/conformal.hpp"
#include "weiermnv/immersion.hpp"
#include "weiermnv/invariants.hpp"
#include "weiermnv/mkdv.hpp"
#include "weiermnv/weierstrass.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace wmnv::io {

using json = nlohmann::ordered_json;

/// Throws Io.
std::string read_text(const std::string &path);
void write_text(const std::string &path, const std::string &text);

/// Shortest round-trip decimal form.
std::string number(double x);

json to_json(cplx z);
cplx complex_from_json(const json &j);

/// {tau_re, tau_im, nx, ny, values}.
json to_json(const ScalarField &f);
/// Accepts the field object itself or any object holding it under "potential".
ScalarField field_from_json(const json &j);

/// {tau, nx, ny, points}.
json to_json(const Immersion &X);
/// Accepts the immersion object itself or an object holding it under "immersion".
Immersion immersion_from_json(const json &j);

/// {tau, nx, ny, mult1, mult2, psi1, psi2}.
json to_json(const SpinorField &s);
SpinorField spinor_from_json(const json &j);

/// {K, h, even_residual, nx, ny, tau, tail_ratio, resolution_warning}.
json to_json(const InvariantVector &v);

json to_json(const InvarianceReport &r);
/// k, re_before, im_before, re_after, im_after, abs_diff, rel_diff.
std::string invariance_csv(const std::vector<InvarianceReport> &reports);

json to_json(const SliceResult &s);
/// k, re_w2, im_w2, residual, M, nx, ny.
std::string slice_csv(const SliceResult &s);

json to_json(const MonodromyData &m);

json to_json(const TrajectoryRow &r);
/// t, h1_re, h3_re, h3_im, l2_norm, linf_norm.
std::string trajectory_csv(const std::vector<TrajectoryRow> &rows);

json to_json(const CalibrationResult &c);

/// CSV with header "s,r,h" or JSON {fourier_r: [[a,b]...], fourier_h: [...]};
/// the format is sniffed from the first non-blank character. Throws Io or DegenerateProfile.
ProfileCurve profile_from_text(const std::string &text);

/// "R=2,r=1" (either order). Throws InvalidArgument.
ProfileCurve torus_from_spec(const std::string &spec);

/// "1", "-0.5+2i", "0.3-1e-2i", "2i", "(a,b)". Throws InvalidArgument.
cplx parse_complex(const std::string &text);

} // namespace wmnv::io
