#include "weiermnv/io.hpp"

#include "weiermnv/errors.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace wmnv::io {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

double parse_double(const std::string &text, const std::string &what) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    double x = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || ec != std::errc{} || p != t.data() + t.size())
        throw Error(ErrorCode::InvalidArgument, "cannot read a number from '" + text + "' (" + what + ")");
    return x;
}

json values_json(const ScalarField &f) {
    json out = json::array();
    for (const cplx z : f.values()) out.push_back(to_json(z));
    return out;
}

std::vector<cplx> values_from(const json &arr, std::size_t expected, const char *what) {
    if (!arr.is_array() || arr.size() != expected)
        throw Error(ErrorCode::Io, std::string(what) + ": expected " + std::to_string(expected) + " values");
    std::vector<cplx> v;
    v.reserve(expected);
    for (const auto &z : arr) v.push_back(complex_from_json(z));
    return v;
}

template <class F>
auto guarded(const char *what, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception &e) {
        throw Error(ErrorCode::Io, std::string(what) + ": " + e.what());
    }
}

cplx tau_from(const json &j) {
    if (j.contains("tau")) return complex_from_json(j.at("tau"));
    return {j.at("tau_re").get<double>(), j.at("tau_im").get<double>()};
}

std::string csv_join(std::initializer_list<std::string> cells) {
    std::string line;
    for (const auto &c : cells) {
        if (!line.empty()) line += ',';
        line += c;
    }
    return line + '\n';
}

} // namespace

std::string read_text(const std::string &path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string &path, const std::string &text) {
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
}

std::string number(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, r.ptr};
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json &j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::Io, "complex numbers are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const ScalarField &f) {
    const auto &g = f.grid();
    return json{{"tau_re", g.tau().real()},
                {"tau_im", g.tau().imag()},
                {"nx", g.nx()},
                {"ny", g.ny()},
                {"values", values_json(f)}};
}

ScalarField field_from_json(const json &j) {
    return guarded("potential", [&] {
        const json &f = j.contains("potential") ? j.at("potential") : j;
        const auto g = TorusGrid::make(tau_from(f), f.at("nx").get<int>(), f.at("ny").get<int>());
        return ScalarField(g, values_from(f.at("values"), g.size(), "potential"));
    });
}

json to_json(const Immersion &X) {
    const auto &g = X.grid();
    json pts = json::array();
    for (const auto &p : X.points()) pts.push_back(json::array({p.x(), p.y(), p.z()}));
    return json{{"tau", to_json(g.tau())}, {"nx", g.nx()}, {"ny", g.ny()}, {"points", std::move(pts)}};
}

Immersion immersion_from_json(const json &j) {
    return guarded("immersion", [&] {
        const json &f = j.contains("immersion") ? j.at("immersion") : j;
        const auto g = TorusGrid::make(tau_from(f), f.at("nx").get<int>(), f.at("ny").get<int>());
        const auto &pts = f.at("points");
        if (!pts.is_array() || pts.size() != g.size())
            throw Error(ErrorCode::Io, "immersion: expected " + std::to_string(g.size()) + " points");
        std::vector<Vec3> p;
        p.reserve(g.size());
        for (const auto &q : pts) {
            if (!q.is_array() || q.size() != 3) throw Error(ErrorCode::Io, "immersion points are [x, y, z]");
            p.emplace_back(q[0].get<double>(), q[1].get<double>(), q[2].get<double>());
        }
        return Immersion(g, std::move(p));
    });
}

json to_json(const SpinorField &s) {
    const auto &g = s.grid();
    return json{{"tau", to_json(g.tau())}, {"nx", g.nx()},          {"ny", g.ny()},
                {"mult1", s.mult1},        {"mult2", s.mult2},      {"psi1", values_json(s.psi1)},
                {"psi2", values_json(s.psi2)}};
}

SpinorField spinor_from_json(const json &j) {
    return guarded("spinor", [&] {
        const json &f = j.contains("spinor") ? j.at("spinor") : j;
        const auto g = TorusGrid::make(tau_from(f), f.at("nx").get<int>(), f.at("ny").get<int>());
        return SpinorField(ScalarField(g, values_from(f.at("psi1"), g.size(), "psi1")),
                           ScalarField(g, values_from(f.at("psi2"), g.size(), "psi2")), f.at("mult1").get<int>(),
                           f.at("mult2").get<int>());
    });
}

json to_json(const InvariantVector &v) {
    json h = json::array();
    for (const cplx z : v.h) h.push_back(to_json(z));
    return json{{"K", static_cast<int>(v.h.size())},
                {"h", std::move(h)},
                {"even_residual", v.even_residual},
                {"nx", v.nx},
                {"ny", v.ny},
                {"tau", to_json(v.tau)},
                {"tail_ratio", v.tail_ratio},
                {"resolution_warning", v.resolution_warning}};
}

json to_json(const InvarianceReport &r) {
    json rows = json::array();
    for (const auto &row : r.rows)
        rows.push_back(json{{"k", row.k},
                            {"before", to_json(row.before)},
                            {"after", to_json(row.after)},
                            {"abs_diff", row.abs_diff},
                            {"rel_diff", row.rel_diff}});
    return json{{"transform", r.transform},
                {"seed", r.seed},
                {"K", r.K},
                {"nx", r.nx},
                {"ny", r.ny},
                {"tau", to_json(r.tau)},
                {"rows", std::move(rows)},
                {"willmore_before", r.willmore_before},
                {"willmore_after", r.willmore_after},
                {"willmore_rel_diff", r.willmore_rel_diff},
                {"conformality_after", r.conformality_after},
                {"max_odd_rel_diff", r.max_odd_rel_diff()},
                {"resolution_warning", r.resolution_warning}};
}

std::string invariance_csv(const std::vector<InvarianceReport> &reports) {
    std::string out = reports.size() > 1 ? "transform,k,re_before,im_before,re_after,im_after,abs_diff,rel_diff\n"
                                         : "k,re_before,im_before,re_after,im_after,abs_diff,rel_diff\n";
    for (const auto &r : reports)
        for (const auto &row : r.rows) {
            if (reports.size() > 1) out += '"' + r.transform + "\",";
            out += csv_join({std::to_string(row.k), number(row.before.real()), number(row.before.imag()),
                             number(row.after.real()), number(row.after.imag()), number(row.abs_diff),
                             number(row.rel_diff)});
        }
    return out;
}

json to_json(const SliceResult &s) {
    json pts = json::array();
    for (const auto &p : s.points)
        pts.push_back(json{{"w1", to_json(p.w1)},
                           {"w2", to_json(p.w2)},
                           {"p1", to_json(p.p1)},
                           {"p2", to_json(p.p2)},
                           {"branch1", p.branch1},
                           {"branch2", p.branch2},
                           {"residual", p.residual}});
    return json{{"p1", to_json(s.p1)},   {"branch1", s.branch1},
                {"M", s.M},              {"nx", s.nx},
                {"ny", s.ny},            {"block_diagonal", s.block_diagonal},
                {"points", std::move(pts)}, {"diagnostics", s.diagnostics}};
}

std::string slice_csv(const SliceResult &s) {
    std::string out = "k,re_w2,im_w2,residual,M,nx,ny\n";
    for (std::size_t k = 0; k < s.points.size(); ++k) {
        const auto &p = s.points[k];
        out += csv_join({std::to_string(k), number(p.w2.real()), number(p.w2.imag()), number(p.residual),
                         std::to_string(s.M), std::to_string(s.nx), std::to_string(s.ny)});
    }
    return out;
}

json to_json(const MonodromyData &m) {
    json mat = json::array();
    for (int r = 0; r < 2; ++r) mat.push_back(json::array({to_json(m.matrix(r, 0)), to_json(m.matrix(r, 1))}));
    return json{{"kappa", m.kappa},
                {"matrix", std::move(mat)},
                {"eigenvalues", json::array({to_json(m.eigenvalues[0]), to_json(m.eigenvalues[1])})},
                {"steps", m.steps}};
}

json to_json(const TrajectoryRow &r) {
    return json{{"t", r.t},
                {"h1", to_json(r.h1)},
                {"h3", to_json(r.h3)},
                {"l2_norm", r.l2_norm},
                {"linf_norm", r.linf_norm}};
}

std::string trajectory_csv(const std::vector<TrajectoryRow> &rows) {
    std::string out = "t,h1_re,h3_re,h3_im,l2_norm,linf_norm\n";
    for (const auto &r : rows)
        out += csv_join({number(r.t), number(r.h1.real()), number(r.h3.real()), number(r.h3.imag()),
                         number(r.l2_norm), number(r.linf_norm)});
    return out;
}

json to_json(const CalibrationResult &c) {
    json curve = json::array();
    for (const auto &p : c.curve) curve.push_back(json{{"c", p.c}, {"h3_drift", p.h3_drift}, {"h1_drift", p.h1_drift}});
    return json{{"c_star", c.c_star},
                {"drift_at_c_star", c.drift_at_c_star},
                {"degenerate", c.degenerate},
                {"note", c.note},
                {"curve", std::move(curve)}};
}

ProfileCurve profile_from_text(const std::string &text) {
    const std::string t = trim(text);
    if (t.empty()) throw Error(ErrorCode::Io, "empty profile");
    if (t.front() == '{') {
        return guarded("profile", [&] {
            const auto j = json::parse(t);
            const auto coeffs = [&](const char *key) {
                std::vector<std::pair<double, double>> out;
                for (const auto &ab : j.at(key)) {
                    if (ab.is_number()) out.emplace_back(ab.get<double>(), 0.0);
                    else out.emplace_back(ab.at(0).get<double>(), ab.at(1).get<double>());
                }
                return out;
            };
            return ProfileCurve::from_fourier(coeffs("fourier_r"), coeffs("fourier_h"));
        });
    }
    std::istringstream in(t);
    std::string line;
    std::getline(in, line);
    std::string header;
    for (char ch : line)
        if (!std::isspace(static_cast<unsigned char>(ch))) header += ch;
    if (header != "s,r,h") throw Error(ErrorCode::Io, "profile CSV must start with the header s,r,h");
    std::vector<double> r, h;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 3) throw Error(ErrorCode::Io, "profile CSV row " + std::to_string(row) + " needs 3 columns");
        const double rv = parse_double(cells[1], "r"), hv = parse_double(cells[2], "h");
        if (!(rv > 0.0))
            throw Error(ErrorCode::DegenerateProfile, "profile CSV row " + std::to_string(row) + " has r = " +
                                                          number(rv) + " <= 0 (the curve reaches the axis)");
        r.push_back(rv);
        h.push_back(hv);
    }
    return ProfileCurve::from_samples(r, h);
}

ProfileCurve torus_from_spec(const std::string &spec) {
    double R = -1.0, r = -1.0;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "torus spec items are R=.. and r=..");
        const std::string key = trim(item.substr(0, eq));
        const double v = parse_double(item.substr(eq + 1), "torus " + key);
        if (key == "R") R = v;
        else if (key == "r") r = v;
        else throw Error(ErrorCode::InvalidArgument, "unknown torus parameter '" + key + "'");
    }
    if (!(R > 0.0) || !(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "torus spec needs positive R and r");
    if (r >= R)
        throw Error(ErrorCode::DegenerateProfile, "tube radius r = " + number(r) + " reaches the axis (R = " +
                                                      number(R) + ")");
    return ProfileCurve::torus(R, r);
}

cplx parse_complex(const std::string &text) {
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.size() >= 2 && t.front() == '(' && t.back() == ')') {
        const auto comma = t.find(',');
        if (comma == std::string::npos) throw Error(ErrorCode::InvalidArgument, "bad complex '" + text + "'");
        return {parse_double(t.substr(1, comma - 1), "re"), parse_double(t.substr(comma + 1, t.size() - comma - 2), "im")};
    }
    if (t.empty()) throw Error(ErrorCode::InvalidArgument, "empty complex number");
    if (t.back() != 'i' && t.back() != 'j') return {parse_double(t, "complex"), 0.0};
    t.pop_back();
    // Split at the last sign that is not part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t i = t.size(); i-- > 1;)
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
            split = i;
            break;
        }
    const auto imag_of = [&](std::string s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return parse_double(s, "im");
    };
    if (split == std::string::npos) return {0.0, imag_of(t)};
    return {parse_double(t.substr(0, split), "re"), imag_of(t.substr(split))};
}

} // namespace wmnv::io
