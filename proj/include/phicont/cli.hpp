#pragma once

// Run configuration, orchestration of a sweep, and the CSV / JSON / SVG writers
// behind the phicont command line tool.

#include "phicont/analysis.hpp"
#include "phicont/continuation.hpp"
#include "phicont/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace phicont::cli {

using nlohmann::json;

inline constexpr const char* kOutputDirEnv = "PHICONT_OUTPUT_DIR";

enum ExitCode : int {
    kOk = 0,
    kUnverified = 1,
    kBadInput = 2,
    kFirstPointFailed = 3,
};

struct RunConfig {
    // problem
    std::string phi = "relativistic";
    std::string g = "sin";
    double lambda = 0.0;
    double k = 0.1;
    double T = 1.0;
    std::string forcing_kind = "sin";
    double amplitude = 0.0;
    std::vector<Harmonic> harmonics;
    int N = 256;
    // sweep
    double xi0 = 0.0;
    double dxi = 0.1;
    int nsteps = 0;
    // solver
    double newton_tol = 1e-10;
    int max_newton_iters = 12;
    int n_kappa_steps = 10;
    double ivp_rtol = 1e-10;
    double ivp_atol = 1e-12;
    bool two_step_mode = false;
    // output
    std::string directory = "out";
    bool emit_svg = true;
    std::vector<double> profile_xis;
    std::vector<double> multiplicity_levels;
};

namespace detail {

inline void check_keys(const json& obj, const std::string& block, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError("'" + block + "' must be a JSON object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in '" + block + "'");
}

template <class V>
void read(const json& obj, const char* key, V& out, bool required) {
    if (!obj.contains(key)) {
        if (required) throw ConfigError(std::string("missing key '") + key + "'");
        return;
    }
    try {
        obj.at(key).get_to(out);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("bad value for '") + key + "': " + ex.what());
    }
}

} // namespace detail

/// Reads a configuration document. Unknown keys are rejected.
inline RunConfig parse_config(const json& doc) {
    using detail::check_keys;
    using detail::read;
    RunConfig c;
    check_keys(doc, "config", {"problem", "sweep", "solver", "output"});
    if (!doc.contains("problem")) throw ConfigError("missing 'problem' block");
    if (!doc.contains("sweep")) throw ConfigError("missing 'sweep' block");

    const auto& p = doc.at("problem");
    check_keys(p, "problem", {"phi", "g", "lambda", "k", "T", "forcing", "N"});
    read(p, "phi", c.phi, true);
    read(p, "g", c.g, true);
    read(p, "lambda", c.lambda, true);
    read(p, "k", c.k, true);
    read(p, "T", c.T, true);
    read(p, "N", c.N, false);
    if (!p.contains("forcing")) throw ConfigError("missing key 'forcing'");
    const auto& f = p.at("forcing");
    check_keys(f, "forcing", {"kind", "amplitude", "harmonics"});
    read(f, "kind", c.forcing_kind, true);
    read(f, "amplitude", c.amplitude, true);
    if (c.forcing_kind != "sin" && c.forcing_kind != "cos")
        throw ConfigError("forcing kind must be \"sin\" or \"cos\"");
    if (f.contains("harmonics")) {
        const auto& hs = f.at("harmonics");
        if (!hs.is_array()) throw ConfigError("'harmonics' must be a list of [n, sin_amp, cos_amp]");
        for (const auto& h : hs) {
            if (!h.is_array() || h.size() != 3 || !h[0].is_number_integer() || !h[1].is_number() ||
                !h[2].is_number())
                throw ConfigError("each harmonic must be [n, sin_amp, cos_amp] with integer n");
            c.harmonics.push_back({h[0].get<int>(), h[1].get<double>(), h[2].get<double>()});
        }
    }

    const auto& s = doc.at("sweep");
    check_keys(s, "sweep", {"xi0", "dxi", "nsteps"});
    read(s, "xi0", c.xi0, true);
    read(s, "dxi", c.dxi, true);
    read(s, "nsteps", c.nsteps, true);
    if (c.nsteps < 0) throw ConfigError("'nsteps' must be nonnegative");
    if (c.nsteps > 0 && c.dxi == 0.0) throw ConfigError("'dxi' must be nonzero");

    if (doc.contains("solver")) {
        const auto& v = doc.at("solver");
        check_keys(v, "solver",
                   {"newton_tol", "max_newton_iters", "n_kappa_steps", "ivp_rtol", "ivp_atol", "two_step_mode"});
        read(v, "newton_tol", c.newton_tol, false);
        read(v, "max_newton_iters", c.max_newton_iters, false);
        read(v, "n_kappa_steps", c.n_kappa_steps, false);
        read(v, "ivp_rtol", c.ivp_rtol, false);
        read(v, "ivp_atol", c.ivp_atol, false);
        read(v, "two_step_mode", c.two_step_mode, false);
        if (!(c.newton_tol > 0.0) || c.max_newton_iters < 1 || c.n_kappa_steps < 1 || !(c.ivp_rtol > 0.0) ||
            !(c.ivp_atol > 0.0))
            throw ConfigError("solver settings must be positive");
    }
    if (doc.contains("output")) {
        const auto& o = doc.at("output");
        check_keys(o, "output", {"directory", "emit_svg", "profile_xis", "multiplicity_levels"});
        read(o, "directory", c.directory, false);
        read(o, "emit_svg", c.emit_svg, false);
        read(o, "profile_xis", c.profile_xis, false);
        read(o, "multiplicity_levels", c.multiplicity_levels, false);
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& ex) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + ex.what());
    }
    return parse_config(doc);
}

inline ProblemSpec make_spec(const RunConfig& c) {
    std::vector<Harmonic> terms;
    if (c.forcing_kind == "sin") terms.push_back({1, c.amplitude, 0.0});
    else terms.push_back({1, 0.0, c.amplitude});
    terms.insert(terms.end(), c.harmonics.begin(), c.harmonics.end());
    if (!(c.T > 0.0)) throw ConfigError("period T must be positive");
    return ProblemSpec{make_phi(c.phi), make_g(c.g), c.lambda, c.k, c.T, Forcing::trig(c.T, terms), c.N};
}

inline SolverOptions make_solver_options(const RunConfig& c) {
    SolverOptions o;
    o.newton_tol = c.newton_tol;
    o.max_newton_iters = c.max_newton_iters;
    o.n_kappa_steps = c.n_kappa_steps;
    o.ivp.rtol = c.ivp_rtol;
    o.ivp.atol = c.ivp_atol;
    o.two_step_mode = c.two_step_mode;
    return o;
}

/// The environment override wins over the configured directory.
inline std::filesystem::path output_directory(const RunConfig& c) {
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return c.directory;
}

// ---------------------------------------------------------------- writers

/// 15 significant digits, C locale, "nan" for missing values.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline const std::vector<std::string>& branch_columns() {
    static const std::vector<std::string> cols{"xi",        "mu",        "u_at_0",          "uprime_at_0",
                                               "sup_uprime", "variation", "shooting_defect", "newton_iters",
                                               "verified"};
    return cols;
}

inline void write_branch_csv(std::ostream& out, const BranchCurve& curve) {
    const auto& cols = branch_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : curve.points) {
        const auto* s = p.solution ? &*p.solution : nullptr;
        out << fmt(p.xi) << ',' << fmt(s ? s->mu : nan) << ',' << fmt(s ? s->u0 : nan) << ','
            << fmt(s ? s->uprime0 : nan) << ',' << fmt(s ? s->sup_uprime : nan) << ','
            << fmt(s ? s->variation : nan) << ',' << fmt(p.shooting_defect) << ','
            << (s ? s->total_newton_iterations : 0) << ',' << (p.verified ? 1 : 0) << '\n';
    }
}

inline void write_profile_csv(std::ostream& out, const PeriodicSolution& sol) {
    out << "t,u,uprime\n";
    const auto& grid = sol.U.grid();
    for (int j = 0; j < grid.N; ++j)
        out << fmt(grid.node(j)) << ',' << fmt(sol.xi + sol.U[j]) << ',' << fmt(sol.uprime[j]) << '\n';
}

inline std::string profile_filename(double xi) { return "profile_" + fmt(xi) + ".csv"; }

namespace detail {

// Tick spacing of 1, 2 or 5 times a power of ten giving about five ticks.
inline double nice_step(double span) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v, double step) {
    if (std::abs(v) < 1e-12 * step) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace detail

/// mu against xi as polylines (broken at unsolved points) with ticked axes.
inline void write_branch_svg(std::ostream& out, const BranchCurve& curve) {
    using detail::svg_num;
    const double W = 720, H = 480, left = 80, right = 20, top = 20, bottom = 60;
    double xmin = +INFINITY, xmax = -INFINITY, ymin = +INFINITY, ymax = -INFINITY;
    for (const auto& p : curve.points) {
        xmin = std::min(xmin, p.xi);
        xmax = std::max(xmax, p.xi);
        if (p.solved()) {
            ymin = std::min(ymin, p.mu());
            ymax = std::max(ymax, p.mu());
        }
    }
    if (!(ymax >= ymin)) ymin = -1.0, ymax = 1.0;
    if (xmax == xmin) xmin -= 1.0, xmax += 1.0;
    if (ymax == ymin) ymin -= 1.0, ymax += 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto X = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
    auto Y = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g stroke=\"black\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\""
        << H - bottom << "\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
        << "\"/>\n</g>\n";

    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    const double xs = detail::nice_step(xmax - xmin);
    for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
        out << "<line x1=\"" << svg_num(X(t)) << "\" y1=\"" << H - bottom << "\" x2=\"" << svg_num(X(t))
            << "\" y2=\"" << H - bottom + 5 << "\" stroke=\"black\"/>";
        out << "<text x=\"" << svg_num(X(t)) << "\" y=\"" << H - bottom + 20 << "\" text-anchor=\"middle\">"
            << detail::tick_label(t, xs) << "</text>\n";
    }
    const double ys = detail::nice_step(ymax - ymin);
    for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys) {
        out << "<line x1=\"" << left - 5 << "\" y1=\"" << svg_num(Y(t)) << "\" x2=\"" << left << "\" y2=\""
            << svg_num(Y(t)) << "\" stroke=\"black\"/>";
        out << "<text x=\"" << left - 8 << "\" y=\"" << svg_num(Y(t) + 4) << "\" text-anchor=\"end\">"
            << detail::tick_label(t, ys) << "</text>\n";
    }
    out << "<text x=\"" << svg_num((left + W - right) / 2) << "\" y=\"" << H - 15
        << "\" text-anchor=\"middle\">&#958;</text>\n";
    out << "<text x=\"20\" y=\"" << svg_num((top + H - bottom) / 2) << "\" text-anchor=\"middle\">&#956;</text>\n";
    out << "</g>\n";

    auto flush = [&](std::vector<std::string>& pts) {
        if (pts.size() >= 2) {
            out << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i) out << (i ? " " : "") << pts[i];
            out << "\"/>\n";
        } else if (pts.size() == 1) {
            const auto comma = pts[0].find(',');
            out << "<circle cx=\"" << pts[0].substr(0, comma) << "\" cy=\"" << pts[0].substr(comma + 1)
                << "\" r=\"2\" fill=\"#1f4e9c\"/>\n";
        }
        pts.clear();
    };
    std::vector<std::string> pts;
    for (const auto& p : curve.points) {
        if (!p.solved()) {
            flush(pts);
            continue;
        }
        pts.push_back(svg_num(X(p.xi)) + "," + svg_num(Y(p.mu())));
    }
    flush(pts);
    out << "</svg>\n";
}

inline json to_json(const ValidationReport& v) {
    return {{"forcing_mean", v.forcing_mean},
            {"k_times_G", v.k_times_G},
            {"a0_times_omega", v.a0_times_omega},
            {"uniqueness_regime", v.uniqueness_regime},
            {"literal_uniqueness", v.literal_uniqueness},
            {"aT", v.aT},
            {"two_solution_hypothesis", v.two_solution_hypothesis},
            {"mu_window_half_width", v.mu_window_half_width},
            {"warnings", v.warnings}};
}

namespace detail {

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace detail

inline json to_json(const BranchFeatures& f) {
    using detail::num;
    using detail::opt;
    return {{"shape", f.shape},
            {"limit_left", num(f.limit_left)},
            {"limit_right", num(f.limit_right)},
            {"mu_minus", num(f.mu_minus)},
            {"xi_at_mu_minus", num(f.xi_at_mu_minus)},
            {"mu_plus", num(f.mu_plus)},
            {"xi_at_mu_plus", num(f.xi_at_mu_plus)},
            {"zero_crossings", f.zero_crossings},
            {"shift_period", f.shift_period},
            {"shift_defect", opt(f.shift_defect)},
            {"expected_limit_left", opt(f.expected_limit_left)},
            {"expected_limit_right", opt(f.expected_limit_right)},
            {"strictly_inside_limits", opt(f.strictly_inside_limits)},
            {"sign_pattern_at_ends", opt(f.sign_pattern_at_ends)},
            {"has_zero_crossing", opt(f.has_zero_crossing)}};
}

/// Worst-case audit margins over all solved points.
inline json audit_summary(const BranchCurve& curve, const ProblemSpec& spec) {
    std::size_t n = 0, holding = 0;
    double sob = INFINITY, wir = INFINITY, ene = INFINITY, chain = INFINITY, ident = 0.0;
    bool chain_applicable = false;
    for (const auto& p : curve.points) {
        if (!p.solved()) continue;
        const auto r = inequality_audit(*p.solution, spec);
        ++n;
        holding += r.all_hold();
        sob = std::min(sob, r.sobolev_margin);
        wir = std::min(wir, r.wirtinger_margin);
        ene = std::min(ene, r.energy_margin);
        chain_applicable = r.chain_applicable;
        if (r.chain_applicable) chain = std::min(chain, r.chain_margin);
        ident = std::max(ident, r.identity_defect);
    }
    using detail::num;
    return {{"points", n},
            {"all_hold", holding},
            {"min_sobolev_margin", num(sob)},
            {"min_wirtinger_margin", num(wir)},
            {"min_energy_margin", num(ene)},
            {"chain_applicable", chain_applicable},
            {"min_chain_margin", num(chain)},
            {"max_identity_defect", ident}};
}

// ---------------------------------------------------------------- commands

namespace detail {

inline bool write_file(const std::filesystem::path& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) {
        err << "error: cannot write " << path.string() << '\n';
        return false;
    }
    return true;
}

inline const PeriodicSolution* nearest_solved(const BranchCurve& curve, double xi) {
    const PeriodicSolution* best = nullptr;
    double dist = INFINITY;
    for (const auto& p : curve.points)
        if (p.solved() && std::abs(p.xi - xi) < dist) {
            dist = std::abs(p.xi - xi);
            best = &*p.solution;
        }
    return best;
}

} // namespace detail

/// Runs the sweep for one configuration and writes all outputs.
inline int run(const std::filesystem::path& config_path, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    RunConfig cfg;
    ProblemSpec spec;
    ValidationReport validation;
    try {
        cfg = load_config(config_path);
        spec = make_spec(cfg);
        validation = validate_spec(spec);
    } catch (const Error& ex) {
        err << "error: " << ex.what() << '\n';
        return kBadInput;
    }
    for (const auto& w : validation.warnings) err << "warning: " << w << '\n';

    const auto dir = output_directory(cfg);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        err << "error: cannot create output directory " << dir.string() << ": " << ec.message() << '\n';
        return kBadInput;
    }

    const auto opts = make_solver_options(cfg);
    BranchCurve curve;
    try {
        curve = sweep_xi(spec, cfg.xi0, cfg.dxi, cfg.nsteps, opts);
    } catch (const ConvergenceError& ex) {
        err << "error: " << ex.what() << '\n';
        return kFirstPointFailed;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << '\n';
        return kBadInput;
    }
    verify_branch(spec, curve);

    std::size_t verified = 0;
    double worst_defect = 0.0;
    json gaps = json::array();
    for (const auto& p : curve.points) {
        if (p.verified) ++verified;
        else gaps.push_back({{"xi", p.xi}, {"reason", p.failure}});
        if (p.solved() && std::isfinite(p.shooting_defect)) worst_defect = std::max(worst_defect, p.shooting_defect);
    }

    std::ostringstream csv;
    write_branch_csv(csv, curve);
    if (!detail::write_file(dir / "branch.csv", csv.str(), err)) return kBadInput;

    json profiles = json::array();
    for (double xi : cfg.profile_xis) {
        std::optional<PeriodicSolution> sol;
        std::string why;
        // warm start from the nearest branch point, then a cold start
        for (const auto* warm : {detail::nearest_solved(curve, xi), static_cast<const PeriodicSolution*>(nullptr)}) {
            try {
                sol = solve_at_xi(spec, xi, warm, opts);
                break;
            } catch (const Error& ex) {
                why = ex.what();
            }
        }
        if (!sol) {
            err << "warning: no profile at xi = " << fmt(xi) << ": " << why << '\n';
            profiles.push_back({{"xi", xi}, {"error", why}});
            continue;
        }
        std::ostringstream s;
        write_profile_csv(s, *sol);
        const auto name = profile_filename(xi);
        if (!detail::write_file(dir / name, s.str(), err)) return kBadInput;
        profiles.push_back({{"xi", xi}, {"mu", sol->mu}, {"variation", sol->variation}, {"file", name}});
    }

    const auto features = branch_features(curve, spec);
    json mult = json::array();
    for (double level : cfg.multiplicity_levels) {
        const auto m = multiplicity(curve, spec, level);
        mult.push_back({{"level", level},
                        {"count", m.count},
                        {"per_period", m.per_period},
                        {"window", {m.window_start, m.window_end}},
                        {"xis", m.xis}});
    }

    json summary = {
        {"problem",
         {{"phi", cfg.phi},
          {"g", cfg.g},
          {"lambda", cfg.lambda},
          {"k", cfg.k},
          {"T", cfg.T},
          {"N", cfg.N},
          {"forcing", spec.e.description}}},
        {"validation", to_json(validation)},
        {"sweep",
         {{"xi0", cfg.xi0},
          {"dxi", cfg.dxi},
          {"nsteps", cfg.nsteps},
          {"points", curve.points.size()},
          {"solved", curve.solved_count()},
          {"verified", verified},
          {"max_shooting_defect", worst_defect},
          {"flagged", gaps}}},
        {"features", to_json(features)},
        {"multiplicity", mult},
        {"audit", audit_summary(curve, spec)},
        {"profiles", profiles},
    };
    if (!detail::write_file(dir / "summary.json", summary.dump(2) + "\n", err)) return kBadInput;

    if (cfg.emit_svg) {
        std::ostringstream svg;
        write_branch_svg(svg, curve);
        if (!detail::write_file(dir / "branch.svg", svg.str(), err)) return kBadInput;
    }

    out << config_path.filename().string() << ": " << curve.points.size() << " points, " << curve.solved_count()
        << " solved, " << verified << " verified, max shooting defect " << fmt(worst_defect) << " -> "
        << dir.string() << '\n';
    return verified == curve.points.size() ? kOk : kUnverified;
}

/// Re-shoots every row of a branch file from its stored (u(0), u'(0), mu).
inline int verify(const std::filesystem::path& config_path, const std::filesystem::path& csv_path,
                  std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    ProblemSpec spec;
    try {
        spec = make_spec(load_config(config_path));
        validate_spec(spec);
    } catch (const Error& ex) {
        err << "error: " << ex.what() << '\n';
        return kBadInput;
    }
    std::ifstream in(csv_path);
    if (!in) {
        err << "error: cannot open " << csv_path.string() << '\n';
        return kBadInput;
    }
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) {
        err << "error: branch file is empty\n";
        return kBadInput;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"xi", "mu", "u_at_0", "uprime_at_0"})
        if (!col.count(need)) {
            err << "error: branch file lacks column '" << need << "'\n";
            return kBadInput;
        }

    std::size_t rows = 0, failed = 0;
    double worst = 0.0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        auto value = [&](const char* name) {
            const auto i = col.at(name);
            if (i >= cells.size()) return std::numeric_limits<double>::quiet_NaN();
            char* end = nullptr;
            const double v = std::strtod(cells[i].c_str(), &end);
            return end == cells[i].c_str() ? std::numeric_limits<double>::quiet_NaN() : v;
        };
        ++rows;
        const double xi = value("xi"), mu = value("mu"), u0 = value("u_at_0"), up0 = value("uprime_at_0");
        if (!std::isfinite(mu) || !std::isfinite(u0) || !std::isfinite(up0)) {
            ++failed;
            out << "xi=" << fmt(xi) << " unsolved FAIL\n";
            continue;
        }
        const auto rep = verify_initial_data(spec, u0, up0, mu);
        if (!rep.passed) ++failed;
        if (std::isfinite(rep.defect)) worst = std::max(worst, rep.defect);
        char buf[160];
        std::snprintf(buf, sizeof buf, "xi=%s mu=%s defect=%.3e %s", fmt(xi).c_str(), fmt(mu).c_str(), rep.defect,
                      rep.passed ? "PASS" : "FAIL");
        out << buf;
        if (!rep.passed && !rep.failure.empty()) out << " (" << rep.failure << ")";
        out << '\n';
    }
    if (rows == 0) {
        err << "error: branch file has no rows\n";
        return kBadInput;
    }
    out << rows << " rows, " << failed << " failed, max defect " << fmt(worst) << '\n';
    return failed == 0 ? kOk : kUnverified;
}

} // namespace phicont::cli
