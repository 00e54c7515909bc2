#include "weiermnv/bloch.hpp"
#include "weiermnv/conformal.hpp"
#include "weiermnv/errors.hpp"
#include "weiermnv/immersion.hpp"
#include "weiermnv/invariants.hpp"
#include "weiermnv/io.hpp"
#include "weiermnv/mkdv.hpp"
#include "weiermnv/parallel.hpp"
#include "weiermnv/weierstrass.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <variant>

using namespace wmnv;
using io::json;

namespace {

constexpr const char *kVersion = "0.1.0";

enum Exit { Ok = 0, Internal = 1, Validation = 2, Threshold = 3 };

struct Input {
    std::string immersion, profile, torus, potential, u;
    std::string tau = "i";
    int n = 64;
    double conformal_tol = 1e-6;
};

struct Common {
    std::string out = "-";
    std::string csv;
    int threads = 0;
    bool quiet = false;
};

void add_geometry(CLI::App *app, Input &in, bool potentials) {
    auto *g = app->add_option_group("input");
    g->add_option("--immersion", in.immersion, "immersion JSON ('-' reads stdin)");
    g->add_option("--profile", in.profile, "profile curve, CSV s,r,h or Fourier JSON");
    g->add_option("--torus", in.torus, "round torus, e.g. R=2,r=1");
    if (potentials) {
        g->add_option("--potential", in.potential, "potential field JSON ('-' reads stdin)");
        g->add_option("--u", in.u, "built-in potential: zero")->check(CLI::IsMember({"zero"}));
    }
    g->require_option(1);
    app->add_option("--n", in.n, "resolution for --profile/--torus/--u")->capture_default_str();
    app->add_option("--conformal-tol", in.conformal_tol, "accepted conformality residual")->capture_default_str();
    if (potentials) app->add_option("--tau", in.tau, "lattice modulus for --u")->capture_default_str();
}

void add_common(CLI::App *app, Common &c, bool csv) {
    app->add_option("-o,--out", c.out, "JSON report path ('-' for stdout)")->capture_default_str();
    if (csv) app->add_option("--csv", c.csv, "CSV side table path");
    app->add_flag("-q,--quiet", c.quiet, "no summary on stderr");
}

void note(const Common &c, const std::string &line) {
    if (!c.quiet) std::cerr << line << '\n';
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

/// Every option of the subcommand with its effective value.
json resolved_config(const CLI::App *app, int threads) {
    json cfg{{"command", app->get_name()}, {"version", kVersion}, {"threads", thread_count(threads)}};
    std::vector<const CLI::Option *> opts = app->get_options();
    for (const auto *grp : app->get_subcommands({}))
        for (const auto *o : grp->get_options()) opts.push_back(o);
    for (const auto *o : opts) {
        const std::string name = o->get_single_name();
        if (name.empty() || name == "help" || name == "quiet") continue;
        if (o->get_expected_max() == 0) {
            cfg[name] = o->count() > 0;
        } else if (o->count() > 0) {
            const auto &r = o->results();
            cfg[name] = r.size() == 1 ? json(r.front()) : json(r);
        } else if (!o->get_default_str().empty()) {
            cfg[name] = o->get_default_str();
        }
    }
    return cfg;
}

json json_parse(const std::string &text) {
    try {
        return json::parse(text);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::Io, std::string("malformed JSON: ") + e.what());
    }
}

Immersion load_immersion(const Input &in) {
    if (!in.immersion.empty()) return io::immersion_from_json(json_parse(io::read_text(in.immersion)));
    const ProfileCurve p = !in.torus.empty() ? io::torus_from_spec(in.torus) : io::profile_from_text(io::read_text(in.profile));
    return revolve(p, in.n, in.n);
}

ScalarField load_potential(const Input &in) {
    if (!in.potential.empty()) return io::field_from_json(json_parse(io::read_text(in.potential)));
    if (!in.u.empty()) return ScalarField(TorusGrid::make(io::parse_complex(in.tau), in.n, in.n));
    return extract_potential(load_immersion(in), in.conformal_tol);
}

void emit(const Common &c, const json &report) { io::write_text(c.out, report.dump(2) + "\n"); }

// surface -----------------------------------------------------------------

int cmd_surface(const CLI::App *app, const Input &in, const Common &c) {
    const ProfileCurve p = !in.torus.empty() ? io::torus_from_spec(in.torus) : io::profile_from_text(io::read_text(in.profile));
    const auto rt = revolve_detailed(p, in.n, in.n);
    const auto &X = rt.immersion;
    const double T = willmore(X);
    json summary{{"willmore", T},
                 {"conformality_residual", X.conformality_residual()},
                 {"conformal_length", rt.conformal_length},
                 {"tau", io::to_json(X.grid().tau())},
                 {"max_cell_diameter", X.max_cell_diameter()}};
    if (X.conformality_residual() <= in.conformal_tol) {
        const auto e = energy_identity_check(X, in.conformal_tol);
        summary["energy_identity"] = json{{"T", e.T}, {"H1", e.H1}, {"rel_err", e.rel_err}};
    }
    note(c, "surface " + std::to_string(X.grid().nx()) + "x" + std::to_string(X.grid().ny()) + "  T = " + io::number(T) +
                "  conformality " + sci(X.conformality_residual()));
    emit(c, json{{"config", resolved_config(app, c.threads)}, {"summary", summary}, {"immersion", io::to_json(X)}});
    return Ok;
}

// invariants --------------------------------------------------------------

int cmd_invariants(const CLI::App *app, const Input &in, const Common &c, int K) {
    const auto X = load_immersion(in);
    const auto U = extract_potential(X, in.conformal_tol);
    const auto inv = mnv_recursion(U, K).invariants;
    const auto e = energy_identity_check(X, in.conformal_tol);
    json report{{"config", resolved_config(app, c.threads)},
                {"invariants", io::to_json(inv)},
                {"energy_identity", {{"T", e.T}, {"H1", e.H1}, {"rel_err", e.rel_err}}},
                {"closed_forms", {{"h1", io::to_json(h1_direct(U))}, {"h3", io::to_json(h3_direct(U))}}}};
    note(c, "h1 = " + io::number(inv[1].real()) + "  T = " + io::number(e.T) + "  |T - H1|/T = " + sci(e.rel_err) +
                "  even residual " + sci(inv.even_residual));
    if (inv.resolution_warning) note(c, "warning: spectral tail " + sci(inv.tail_ratio) + " suggests raising --n");
    emit(c, report);
    return Ok;
}

// verify-conformal ----------------------------------------------------------

struct VerifyArgs {
    std::string transform;
    int sweep = 0;
    std::uint64_t seed = 1;
    int K = 5;
    double tol_h1 = 1e-5, tol_odd = 1e-4, tol_willmore = 1e-6;
    double safety_cells = 5.0;
};

int cmd_verify(const CLI::App *app, const Input &in, const Common &c, const VerifyArgs &a) {
    const auto X = load_immersion(in);
    std::vector<std::pair<ConformalTransform, std::uint64_t>> todo;
    if (!a.transform.empty()) todo.emplace_back(parse_transform(a.transform), a.seed);
    if (a.sweep > 0) {
        static constexpr TransformKind kinds[] = {TransformKind::Translation, TransformKind::Rotation, TransformKind::Dilation,
                                                  TransformKind::Inversion, TransformKind::Reflection};
        RandomTransformOptions ropt;
        ropt.safety_cells = a.safety_cells;
        for (int i = 0; i < a.sweep; ++i) {
            const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
            std::mt19937_64 rng(seed);
            todo.emplace_back(random_transform(kinds[i % 5], rng, X, ropt), seed);
        }
    }
    if (todo.empty()) throw Error(ErrorCode::InvalidArgument, "give --transform or --sweep");

    InvarianceOptions opt;
    opt.apply.safety_cells = a.safety_cells;
    opt.conformal_tolerance = in.conformal_tol;
    std::vector<InvarianceReport> reports;
    json items = json::array();
    bool all_pass = true;
    for (const auto &[t, seed] : todo) {
        auto r = invariance_report(X, t, a.K, opt);
        r.seed = seed;
        double h1_rel = 0.0, odd = 0.0;
        for (const auto &row : r.rows) {
            if (row.k == 1) h1_rel = row.rel_diff;
            else if (row.k % 2 == 1) odd = std::max(odd, row.rel_diff);
        }
        const bool pass = h1_rel < a.tol_h1 && odd < a.tol_odd && r.willmore_rel_diff < a.tol_willmore;
        all_pass = all_pass && pass;
        note(c, (pass ? "pass  " : "FAIL  ") + r.transform + "  h1 " + sci(h1_rel) + "  h3.. " + sci(odd) + "  T " +
                    sci(r.willmore_rel_diff));
        auto j = io::to_json(r);
        j["pass"] = pass;
        items.push_back(std::move(j));
        reports.push_back(std::move(r));
    }
    if (!c.csv.empty()) io::write_text(c.csv, io::invariance_csv(reports));
    emit(c, json{{"config", resolved_config(app, c.threads)}, {"reports", items}, {"pass", all_pass}});
    return all_pass ? Ok : Threshold;
}

// bloch ---------------------------------------------------------------------

struct BlochArgs {
    std::string w1;
    std::string window = "-4:4";
    std::string samples = "401";
    int max_count = 32;
    int M = 0;
    double threshold = 1e-6;
    std::string compare;
    double match_tol = 1e-5;
    std::optional<double> kappa;
};

std::pair<cplx, cplx> parse_window(const std::string &text) {
    // The separator is the first ':' (complex literals never contain one).
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "window is lo:hi, e.g. -4:4 or -1-1i:1+1i");
    return {io::parse_complex(text.substr(0, colon)), io::parse_complex(text.substr(colon + 1))};
}

std::pair<int, int> parse_samples(const std::string &text) {
    const auto x = text.find('x');
    try {
        if (x == std::string::npos) return {std::stoi(text), 1};
        return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
    } catch (const std::exception &) {
        throw Error(ErrorCode::InvalidArgument, "samples is N or NxM, got '" + text + "'");
    }
}

std::vector<double> x_only_row(const ScalarField &U) {
    const auto &g = U.grid();
    std::vector<double> row(g.nx());
    const double scale = std::max(U.max_abs(), 1e-300);
    for (int j = 0; j < g.nx(); ++j) {
        row[j] = U(j, 0).real();
        for (int k = 0; k < g.ny(); ++k)
            if (std::abs(U(j, k) - U(j, 0)) > 1e-8 * scale || std::abs(U(j, k).imag()) > 1e-8 * scale)
                throw Error(ErrorCode::InvalidArgument, "potential is not real and t1-only; this command needs a surface of revolution");
    }
    return row;
}

int cmd_bloch(const CLI::App *app, const Input &in, const Common &c, const BlochArgs &a) {
    const auto U = load_potential(in);
    const auto [lo, hi] = parse_window(a.window);
    const auto [sre, sim] = parse_samples(a.samples);
    SliceOptions opt;
    opt.M = a.M;
    opt.threshold = a.threshold;
    opt.bloch.threads = c.threads;
    const cplx w1 = io::parse_complex(a.w1);
    const auto s = dispersion_slice(U, w1, {lo, hi, sre, sim, a.max_count}, opt);

    json report{{"config", resolved_config(app, c.threads)}, {"slice", io::to_json(s)}};
    note(c, std::to_string(s.points.size()) + " point(s) at w1 = " + a.w1 + "  (M = " + std::to_string(s.M) + ")  " +
                s.diagnostics);
    for (const auto &p : s.points)
        note(c, "  w2 = " + io::number(p.w2.real()) + (p.w2.imag() < 0 ? " - " : " + ") + io::number(std::abs(p.w2.imag())) +
                    "i   residual " + sci(p.residual));

    if (U.max_abs() == 0.0) {
        // Free operator: w2 = e^{λτ} and e^{λ conj τ} with e^λ = w1.
        const cplx lam = std::log(w1), tau = U.grid().tau();
        report["free_variety"] = json::array({io::to_json(std::exp(lam * tau)), io::to_json(std::exp(lam * std::conj(tau)))});
    }
    if (a.kappa) {
        const auto row = x_only_row(U);
        report["monodromy"] = io::to_json(floquet_monodromy(row, 1.0, *a.kappa));
    }

    int code = Ok;
    if (!a.compare.empty()) {
        const auto prev = json_parse(io::read_text(a.compare));
        const auto &pts = prev.contains("slice") ? prev.at("slice").at("points") : prev.at("points");
        double worst = 0.0;
        bool same_count = pts.size() == s.points.size();
        if (same_count)
            for (std::size_t i = 0; i < pts.size(); ++i)
                worst = std::max(worst, std::abs(io::complex_from_json(pts[i].at("w2")) - s.points[i].w2));
        const bool match = same_count && worst <= a.match_tol;
        report["comparison"] = json{{"reference", a.compare},
                                    {"reference_count", pts.size()},
                                    {"count", s.points.size()},
                                    {"max_w2_diff", same_count ? json(worst) : json(nullptr)},
                                    {"tolerance", a.match_tol},
                                    {"match", match}};
        note(c, std::string(match ? "match" : "MISMATCH") + " against " + a.compare +
                    (same_count ? "  max |Δw2| = " + sci(worst) : "  point counts differ"));
        code = match ? Ok : Threshold;
    }
    if (!c.csv.empty()) io::write_text(c.csv, io::slice_csv(s));
    emit(c, report);
    return code;
}

// flow ----------------------------------------------------------------------

struct FlowArgs {
    double T = 0.0;
    double dt = 0.0;
    double c = 24.0;
    int record_every = 100;
    bool calibrate = false;
    CalibrationOptions cal;
};

int cmd_flow(const CLI::App *app, const Input &in, const Common &c, FlowArgs a) {
    const auto U = load_potential(in);
    const auto tau = U.grid().tau();
    if (std::abs(tau.real()) > 1e-12) throw Error(ErrorCode::InvalidArgument, "flow needs a rectangular lattice");
    const auto row = x_only_row(U);
    json report{{"config", resolved_config(app, c.threads)}};

    if (a.calibrate) {
        a.cal.threads = c.threads;
        const auto cal = calibrate_coefficient(row, 1.0, a.cal);
        report["calibration"] = io::to_json(cal);
        note(c, "c* = " + io::number(cal.c_star) + "   drift(c*) = " + sci(cal.drift_at_c_star) +
                    (cal.degenerate ? "   (" + cal.note + ")" : ""));
        note(c, "       c     h3 drift     h1 drift");
        for (const auto &p : cal.curve) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%8.3f   %.3e   %.3e", p.c, p.h3_drift, p.h1_drift);
            note(c, buf);
        }
        if (!cal.degenerate) a.c = cal.c_star;
    }

    FlowState s{row, 0.0, a.c, 1.0};
    const double budget = stability_budget(s);
    report["stability_budget"] = budget;
    if (a.T > 0.0) {
        const double dt_req = a.dt > 0.0 ? a.dt : 0.02 * budget;
        const int steps = std::max(1, static_cast<int>(std::ceil(a.T / dt_req - 1e-9)));
        const double dt = a.T / steps;
        const auto rows = integrate(s, dt, steps, std::max(1, a.record_every));
        json traj = json::array();
        for (const auto &r : rows) traj.push_back(io::to_json(r));
        const auto &f = rows.front(), &b = rows.back();
        const double h1d = std::abs(b.h1 - f.h1) / std::abs(f.h1);
        const double h3d = std::abs(b.h3 - f.h3) / std::max(std::abs(f.h3), std::norm(f.h1));
        report["flow"] = json{{"c", a.c}, {"dt", dt}, {"steps", steps}, {"T", s.t}, {"h1_drift", h1d}, {"h3_drift", h3d},
                              {"trajectory", std::move(traj)}};
        report["potential"] = io::to_json(lift(s, U.grid().ny(), tau.imag()));
        note(c, "flow c = " + io::number(a.c) + "  " + std::to_string(steps) + " steps of " + sci(dt) + "  h1 drift " +
                    sci(h1d) + "  h3 drift " + sci(h3d));
        if (!c.csv.empty()) io::write_text(c.csv, io::trajectory_csv(rows));
    } else if (!a.calibrate) {
        throw Error(ErrorCode::InvalidArgument, "give --T > 0 or --calibrate");
    }
    emit(c, report);
    return Ok;
}

int exit_code(const Error &e) {
    switch (e.code()) {
    case ErrorCode::NoConservingCandidate: return Threshold;
    default: return Validation;
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Weierstrass representation, conserved functionals and Bloch spectra of tori in R^3"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Common common;
    app.add_option("--threads", common.threads, "worker threads (0: WEIER_MNV_THREADS or all cores)")
        ->capture_default_str();

    Input in;
    std::function<int()> run;

    auto *surface = app.add_subcommand("surface", "revolve a profile into a conformally parametrized torus");
    {
        auto *g = surface->add_option_group("input");
        g->add_option("--profile", in.profile, "profile curve, CSV s,r,h or Fourier JSON");
        g->add_option("--torus", in.torus, "round torus, e.g. R=2,r=1");
        g->require_option(1);
        surface->add_option("--n", in.n, "resolution")->capture_default_str();
        surface->add_option("--conformal-tol", in.conformal_tol)->capture_default_str();
        add_common(surface, common, false);
        surface->callback([&] { run = [&] { return cmd_surface(surface, in, common); }; });
    }

    int K = 5;
    auto *invariants = app.add_subcommand("invariants", "h_1..h_K and the energy identity");
    add_geometry(invariants, in, false);
    invariants->add_option("--K", K, "number of coefficients")->capture_default_str()->check(CLI::Range(1, 64));
    add_common(invariants, common, false);
    invariants->callback([&] { run = [&] { return cmd_invariants(invariants, in, common, K); }; });

    VerifyArgs va;
    auto *verify = app.add_subcommand("verify-conformal", "compare h_k before and after conformal maps");
    add_geometry(verify, in, false);
    verify->add_option("--transform", va.transform, "e.g. inversion:0,0,5;dilation:2");
    verify->add_option("--sweep", va.sweep, "number of random transforms (kinds cycle)")->capture_default_str();
    verify->add_option("--seed", va.seed, "seed of the first random transform")->capture_default_str();
    verify->add_option("--K", va.K)->capture_default_str()->check(CLI::Range(1, 64));
    verify->add_option("--tol-h1", va.tol_h1)->capture_default_str();
    verify->add_option("--tol-odd", va.tol_odd, "bound on h_3, h_5, ...")->capture_default_str();
    verify->add_option("--tol-willmore", va.tol_willmore)->capture_default_str();
    verify->add_option("--safety-cells", va.safety_cells, "minimum pole distance in cell diameters")
        ->capture_default_str();
    add_common(verify, common, true);
    verify->callback([&] { run = [&] { return cmd_verify(verify, in, common, va); }; });

    BlochArgs ba;
    auto *bloch = app.add_subcommand("bloch", "Bloch multipliers w2 at fixed w1");
    add_geometry(bloch, in, true);
    bloch->add_option("--w1", ba.w1, "multiplier along the first period")->required();
    bloch->add_option("--window", ba.window, "p2 range lo:hi (complex corners for 2D scans)")->capture_default_str();
    bloch->add_option("--samples", ba.samples, "scan nodes, N or NxM")->capture_default_str();
    bloch->add_option("--max-count", ba.max_count)->capture_default_str();
    bloch->add_option("--M", ba.M, "Fourier truncation per direction (0: automatic)")->capture_default_str();
    bloch->add_option("--threshold", ba.threshold, "largest accepted σ_min/σ_max")->capture_default_str();
    bloch->add_option("--compare", ba.compare, "earlier bloch report to match");
    bloch->add_option("--match-tol", ba.match_tol)->capture_default_str();
    bloch->add_option("--kappa", ba.kappa, "also report the transfer matrix at this κ (t1-only potentials)");
    add_common(bloch, common, true);
    bloch->callback([&] { run = [&] { return cmd_bloch(bloch, in, common, ba); }; });

    FlowArgs fa;
    auto *flow = app.add_subcommand("flow", "u_t = u_xxx + c u^2 u_x on the potential of a surface of revolution");
    add_geometry(flow, in, true);
    flow->add_option("--T", fa.T, "flow time")->capture_default_str();
    flow->add_option("--dt", fa.dt, "step (0: 2% of the stability budget)")->capture_default_str();
    flow->add_option("--c", fa.c, "cubic coefficient")->capture_default_str();
    flow->add_option("--record-every", fa.record_every)->capture_default_str();
    flow->add_flag("--calibrate", fa.calibrate, "search c conserving h_3");
    flow->add_option("--c-min", fa.cal.c_min)->capture_default_str();
    flow->add_option("--c-max", fa.cal.c_max)->capture_default_str();
    flow->add_option("--candidates", fa.cal.candidates)->capture_default_str();
    flow->add_option("--horizon", fa.cal.horizon)->capture_default_str();
    flow->add_option("--steps", fa.cal.steps, "steps per calibration run")->capture_default_str();
    add_common(flow, common, true);
    flow->callback([&] { run = [&] { return cmd_flow(flow, in, common, fa); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : Validation;
    }
    try {
        return run();
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return Internal;
    }
}
