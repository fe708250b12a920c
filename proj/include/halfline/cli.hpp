#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "errors.hpp"
#include "evolution.hpp"
#include "grid.hpp"
#include "schema.hpp"
#include "sets.hpp"
#include "spectral.hpp"
#include "transforms.hpp"

namespace halfline::cli {

using json = nlohmann::json;

enum Exit { ok = 0, config_failure = 2, check_failure = 3, resource_failure = 4 };

// Maps a command name to its schema text.
using SchemaSource = std::function<std::optional<std::string>(const std::string&)>;

struct Outcome {
    int code = ok;
    std::map<std::string, std::string> files;  // written only when the run completes
    std::string message;
};

// JSON text with every double printed to 17 significant digits; non-finite
// values become null.
inline void dump_value(const json& v, std::string& out, int indent, int depth) {
    auto pad = [&](int d) { out += '\n'; out.append(static_cast<std::size_t>(d * indent), ' '); };
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) { out += "{}"; return; }
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                pad(depth + 1);
                out += json(it.key()).dump() + ": ";
                dump_value(it.value(), out, indent, depth + 1);
            }
            pad(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (v.empty()) { out += "[]"; return; }
            out += '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ',';
                pad(depth + 1);
                dump_value(v[i], out, indent, depth + 1);
            }
            pad(depth);
            out += ']';
            return;
        }
        case json::value_t::number_float: {
            double d = v.get<double>();
            out += std::isfinite(d) ? format_real(d) : "null";
            return;
        }
        default:
            out += v.dump();
    }
}

inline std::string dump(const json& v) {
    std::string out;
    dump_value(v, out, 2, 0);
    out += '\n';
    return out;
}

inline std::string csv_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_real(v);
}

// ---- config parsing ----

template <class F>
auto at(const std::string& ptr, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const config_error&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw config_error(ptr, e.what());
    }
}

struct Grids {
    GridPtr x, k;
    long long cap = default_entry_cap;
};

inline Grids parse_grids(const json& g) {
    return at("/grid", [&] {
        Scheme sc = g.value("scheme", std::string("gauss_legendre")) == "midpoint" ? Scheme::midpoint
                                                                                   : Scheme::gauss_legendre;
        int n = g["n"].get<int>();
        int nk = g.value("n_k", n);
        Grids out;
        out.x = make_grid(g["x_max"].get<double>(), n, sc);
        out.k = make_grid(g["k_max"].get<double>(), nk, sc);
        out.cap = g.value("entry_cap", default_entry_cap);
        return out;
    });
}

inline OperatorSpec parse_operator(const json& o) {
    return at("/operator", [&] {
        if (o["kind"] == "point_interaction") return OperatorSpec::point_interaction(o["beta"].get<double>());
        if (o.contains("nu")) return OperatorSpec::inverse_square_nu(o["nu"].get<double>());
        return OperatorSpec::inverse_square(o["alpha"].get<double>());
    });
}

inline IntervalSet parse_set(const json& s) {
    return at("/set", [&] {
        if (s.contains("preset")) {
            auto p = s["preset"].get<std::string>();
            if (p == "half_line") return IntervalSet::half_line();
            if (p == "empty") return IntervalSet::empty();
            if (p == "squares") return IntervalSet::squares(s["n_max"].get<int>());
            return IntervalSet::periodic(s["period"].get<double>(), s["width"].get<double>(), s.value("offset", 0.0));
        }
        std::vector<Interval> cells;
        for (const auto& c : s["cells"]) cells.push_back({c[0].get<double>(), c[1].get<double>()});
        std::optional<double> period;
        if (s.contains("period")) period = s["period"].get<double>();
        return IntervalSet(std::move(cells), period, s.value("cutoff", 0.0));
    });
}

inline json set_to_json(const IntervalSet& s) {
    json cells = json::array();
    for (const auto& c : s.cells()) cells.push_back({c.lo, c.hi});
    json j{{"cells", cells}, {"cutoff", s.cutoff()}};
    j["period"] = s.period() ? json(*s.period()) : json(nullptr);
    return j;
}

// ---- commands ----

struct CheckList {
    json rows = json::array();
    std::vector<std::string> failed;

    void add(const std::string& name, double value, double tol, bool upper = true) {
        bool pass = upper ? value < tol : value >= tol;
        rows.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
        if (!pass) failed.push_back(name);
    }
};

inline Outcome cmd_transforms_check(const json& cfg) {
    Grids g = parse_grids(cfg["grid"]);
    std::vector<double> nus = cfg.value("nu", std::vector<double>{0.0, 0.5, 1.0});
    std::vector<double> betas = cfg.value("beta", std::vector<double>{1.0, 0.0, -1.0});
    json tol = cfg.value("tolerances", json::object());
    double t_pl = tol.value("plancherel", 1e-3), t_inv = tol.value("involution", 1e-3);
    double t_adj = tol.value("adjoint", 1e-2), t_sine = tol.value("sine_kernel", 1e-10);
    CheckList checks;
    for (double nu : nus) {
        auto F = build_kernel(KernelKind::hankel, nu, g.x, g.k, g.cap);
        auto G = build_kernel(KernelKind::hankel, nu, g.k, g.x, g.cap);
        auto fam = hankel_test_family(g.x, nu);
        std::string tag = "nu=" + format_real(nu);
        checks.add("plancherel_hankel[" + tag + "]", plancherel_defect(F, fam), t_pl);
        checks.add("involution_hankel[" + tag + "]", roundtrip_defect(F, G, fam), t_inv);
        if (nu == 0.5) {
            double worst = 0.0;
            for (double x : g.x->nodes)
                for (double k : g.k->nodes)
                    worst = std::max(worst, std::abs(kernel_value(KernelKind::hankel, 0.5, x, k) -
                                                     sqrt_2_over_pi * std::sin(x * k)));
            checks.add("sine_kernel[nu=0.5]", worst, t_sine);
        }
    }
    for (double beta : betas) {
        auto P = build_kernel(KernelKind::point_interaction, beta, g.x, g.k, g.cap);
        auto Q = build_kernel(KernelKind::point_interaction_adjoint, beta, g.k, g.x, g.cap);
        auto fam = gaussian_x_family(g.x);
        std::string tag = "beta=" + format_real(beta);
        checks.add("plancherel_point[" + tag + "]", plancherel_defect(P, fam), t_pl);
        checks.add("adjoint_point[" + tag + "]", roundtrip_defect(P, Q, fam, beta), t_adj);
    }
    json frame = nullptr;
    if (cfg.contains("frame")) {
        const auto& f = cfg["frame"];
        auto fb = t_beta_frame_bounds(f["b"].get<double>(), g.x, g.k, frame_test_family(g.x));
        checks.add("frame_lower[b=" + format_real(f["b"].get<double>()) + "]", fb.lower, f["lower"].get<double>(),
                   false);
        checks.add("frame_upper[b=" + format_real(f["b"].get<double>()) + "]", fb.upper, f["upper"].get<double>());
        frame = {{"b", f["b"]}, {"lower", fb.lower}, {"upper", fb.upper}};
    }
    json rep{{"command", "transforms-check"},
             {"grid", {{"x_max", g.x->x_max}, {"k_max", g.k->x_max}, {"n", g.x->n}, {"n_k", g.k->n},
                       {"scheme", scheme_name(g.x->scheme)}}},
             {"checks", checks.rows},
             {"failed", checks.failed},
             {"frame_bounds", frame},
             {"pass", checks.failed.empty()}};
    Outcome o;
    o.files["transforms_check.json"] = dump(rep);
    if (!checks.failed.empty()) {
        o.code = check_failure;
        o.message = "failing checks:";
        for (const auto& n : checks.failed) o.message += " " + n;
    }
    return o;
}

inline Outcome cmd_sets(const json& cfg) {
    IntervalSet s = parse_set(cfg["set"]);
    std::optional<double> horizon;
    if (cfg.contains("horizon")) horizon = cfg["horizon"].get<double>();
    auto Ls = cfg["L"].get<std::vector<double>>();
    if (!s.is_periodic() && !horizon) throw config_error("/horizon", "aperiodic sets need a scan horizon");
    for (std::size_t i = 0; i < Ls.size(); ++i)
        if (horizon && Ls[i] > *horizon) throw config_error("/L/" + std::to_string(i), "L exceeds the horizon");
    std::string csv = "L,gamma\n";
    json prof = json::array(), mu = nullptr;
    for (double L : Ls) {
        double g = thickness_profile(s, L, horizon);
        csv += format_real(L) + "," + format_real(g) + "\n";
        prof.push_back({{"L", L}, {"gamma", g}});
    }
    if (cfg.contains("mu")) {
        double nu = cfg["mu"]["nu"].get<double>();
        json rows = json::array();
        for (double L : Ls) rows.push_back({{"L", L}, {"gamma", mu_thickness_profile(s, nu, L, horizon)}});
        mu = {{"nu", nu}, {"profile", rows}};
    }
    json transfers = json::array();
    for (const auto& t : cfg.value("transfer", json::array())) {
        Transfer d = t["direction"] == "mu_to_thick" ? Transfer::mu_to_thick : Transfer::thick_to_mu;
        double r = t["r"], L = t["L"], nu = t["nu"];
        json row{{"direction", t["direction"]}, {"r", r}, {"L", L}, {"nu", nu},
                 {"constant", thickness_transfer_constant(d, r, L, nu)}};
        if (d == Transfer::thick_to_mu) row["epsilon"] = transfer_epsilon(r, L, nu);
        transfers.push_back(row);
    }
    json trim = nullptr;
    if (cfg.contains("trim")) {
        const auto& t = cfg["trim"];
        double c = t["c"], L = t["L"], r = t["r"];
        TrimResult tr = at("/trim", [&] { return trim_tail(s, c, ThicknessWitness{r, L}, horizon); });
        std::optional<double> h2;
        if (horizon) h2 = std::max(*horizon, c + tr.L1);
        double achieved = thickness_profile(tr.set, tr.L1, h2);
        trim = {{"c", c}, {"L", L}, {"r", r}, {"L1", tr.L1}, {"r1", tr.r1}, {"gamma_at_L1", achieved},
                {"verified", achieved >= tr.r1}};
    }
    json rep{{"command", "sets"}, {"set", set_to_json(s)}, {"profile", prof}, {"mu_profile", mu},
             {"transfer", transfers}, {"trim", trim}};
    Outcome o;
    o.files["sets.csv"] = csv;
    o.files["sets.json"] = dump(rep);
    if (!trim.is_null() && !trim["verified"].get<bool>()) {
        o.code = check_failure;
        o.message = "trimmed set fails its thickness guarantee";
    }
    return o;
}

inline Outcome cmd_spectral_sweep(const json& cfg) {
    OperatorSpec op = parse_operator(cfg["operator"]);
    Grids g = parse_grids(cfg["grid"]);
    IntervalSet om = parse_set(cfg["set"]);
    double ell = cfg["band_length"];
    std::vector<double> as;
    if (cfg["a"].is_array()) {
        as = cfg["a"].get<std::vector<double>>();
    } else {
        double a0 = cfg["a"]["start"], a1 = cfg["a"]["stop"], st = cfg["a"]["step"];
        if (a1 < a0) throw config_error("/a/stop", "stop must not precede start");
        for (int i = 0; a0 + i * st <= a1 + 1e-9 * st; ++i) as.push_back(a0 + i * st);
    }
    for (std::size_t i = 0; i < as.size(); ++i)
        if (as[i] + ell > g.k->x_max) {
            std::string p = cfg["a"].is_array() ? "/a/" + std::to_string(i) : "/a/stop";
            throw config_error(p, "band [a, a + band_length] leaves [0, k_max]");
        }
    BandOptions bo;
    if (cfg.contains("localization")) bo.localization = cfg["localization"];
    if (cfg.contains("rank_tol")) bo.rank_tol = cfg["rank_tol"];
    int dim = cfg.value("dim", 0);
    json th = cfg.value("thresholds", json::object());
    double t_uni = th.value("uniform_max_over_min", 10.0), t_blow = th.value("blowup_ratio", 10.0);

    SpectralSetup setup = make_setup(op, g.x, g.k, g.cap);
    auto rows = sweep_constant(setup, om, ell, as, dim, bo);
    SweepSummary sm = summarize(rows);
    std::string csv = "a,b,C_star,lambda_min,dim,n_grid\n";
    for (const auto& r : rows)
        csv += format_real(r.a) + "," + format_real(r.b) + "," + csv_real(r.c_star) + "," + csv_real(r.lambda_min) +
               "," + std::to_string(r.dim) + "," + std::to_string(r.n_grid) + "\n";
    json rep{{"command", "spectral-sweep"},
             {"operator", op.describe()},
             {"set", set_to_json(om)},
             {"band_length", ell},
             {"rows", rows.size()},
             {"max_over_min", sm.max_over_min},
             {"blowup_ratio", sm.blowup_ratio},
             {"c_min", sm.c_min},
             {"c_max", sm.c_max},
             {"uniform", sm.max_over_min < t_uni},
             {"non_thick_detected", sm.blowup_ratio >= t_blow}};
    Outcome o;
    o.files["spectral_sweep.csv"] = csv;
    o.files["spectral_sweep.json"] = dump(rep);
    return o;
}

inline Outcome cmd_observe(const json& cfg, std::optional<std::uint64_t> seed) {
    OperatorSpec op = parse_operator(cfg["operator"]);
    Grids g = parse_grids(cfg["grid"]);
    IntervalSet om = parse_set(cfg["set"]);
    double T = cfg["T"];
    int n_t = cfg.value("n_t", std::max(4, static_cast<int>(std::ceil(64 * T))));
    EnsembleOptions eo;
    json e = cfg.value("ensemble", json::object());
    eo.size = e.value("size", eo.size);
    eo.seed = e.value("seed", eo.seed);
    eo.k_lo = e.value("k_lo", eo.k_lo);
    eo.k_hi = e.value("k_hi", eo.k_hi);
    eo.adversarial_fraction = e.value("adversarial_fraction", eo.adversarial_fraction);
    if (seed) eo.seed = *seed;
    if (!(eo.k_hi > eo.k_lo)) throw config_error("/ensemble/k_hi", "k_hi must exceed k_lo");
    if (eo.k_hi > g.k->x_max) throw config_error("/ensemble/k_hi", "ensemble band leaves [0, k_max]");

    PropagatorSpec p{make_setup(op, g.x, g.k, g.cap), T, n_t};
    ObservabilityReport r = estimate_cobs(p, om, eo);
    if (cfg.contains("miller")) r.miller_T_bound = miller_time(cfg["miller"]["k"], cfg["miller"]["D"]);
    const auto& worst = r.worst_initial_datum;
    MassSeries ms = mass_series(p.setup, worst, om, T, n_t);
    std::string series = "t,mass_in_omega\n";
    for (std::size_t i = 0; i < ms.t.size(); ++i) series += format_real(ms.t[i]) + "," + format_real(ms.mass[i]) + "\n";
    json res = json::object();
    for (const auto& [k, v] : r.residuals) res[k] = v;
    json rep{{"command", "observe"},
             {"operator", op.describe()},
             {"c_obs_estimate", r.c_obs_estimate},
             {"worst_index", r.worst_index},
             {"worst_kind", r.worst_kind},
             {"worst_initial_datum", "observe_worst_initial_datum.csv"},
             {"time_series", "observe_timeseries.csv"},
             {"T", r.T},
             {"n_t", n_t},
             {"omega", set_to_json(om)},
             {"miller_T_bound", r.miller_T_bound ? json(*r.miller_T_bound) : json(nullptr)},
             {"residuals", res},
             {"ensemble", {{"size", eo.size}, {"seed", eo.seed}, {"k_lo", eo.k_lo}, {"k_hi", eo.k_hi},
                           {"adversarial_fraction", eo.adversarial_fraction}}},
             {"ratios", r.ratios}};
    Outcome o;
    o.files["observe.json"] = dump(rep);
    o.files["observe_timeseries.csv"] = series;
    o.files["observe_worst_initial_datum.csv"] = to_csv(worst);
    return o;
}

inline Outcome cmd_constants(const json& cfg) {
    json rep{{"command", "constants"}};
    if (cfg.contains("c0")) {
        double L = cfg["c0"]["L"], b = cfg["c0"]["beta"];
        rep["c0"] = {{"L", L}, {"beta", b}, {"C0", at("/c0", [&] { return kovrijkine_c0(L, b); })}};
    }
    if (cfg.contains("kovrijkine")) {
        const auto& k = cfg["kovrijkine"];
        auto c = at("/kovrijkine", [&] {
            return kovrijkine_constants(k["beta"], k["r"], k["L"], k["b_minus_a"], k["c_beta"]);
        });
        rep["kovrijkine"] = {{"input", k},           {"C0", c.C0},
                             {"B", c.B},             {"series_log", c.series_log},
                             {"series_closed", c.series_closed}, {"log_C1", c.log_C1},
                             {"prefactor", c.prefactor}, {"exponent", c.exponent},
                             {"log10_C2", c.log10_C2}};
    }
    if (cfg.contains("ls_predicted")) {
        const auto& l = cfg["ls_predicted"];
        double v = at("/ls_predicted", [&] { return ls_predicted_log10(l["nu"], l["r"], l["L"], l["h"]); });
        rep["ls_predicted"] = {{"input", l},
                               {"log10_C", v},
                               {"exponent", ls_predicted_exponent(l["nu"], l["L"], l["h"])}};
    }
    if (cfg.contains("miller")) {
        double k = cfg["miller"]["k"], D = cfg["miller"]["D"];
        rep["miller"] = {{"k", k}, {"D", D}, {"T_bound", miller_time(k, D)}};
    }
    Outcome o;
    o.files["constants.json"] = dump(rep);
    return o;
}

// ---- driver ----

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"transforms-check", "sets", "spectral-sweep", "observe", "constants"};
    return names;
}

inline Outcome execute(const std::string& command, const std::string& config_text, const SchemaSource& schemas,
                       std::optional<std::uint64_t> seed) {
    Outcome o;
    try {
        json cfg;
        try {
            cfg = json::parse(config_text);
        } catch (const json::parse_error& e) {
            throw config_error("/", std::string("malformed JSON: ") + e.what());
        }
        auto text = schemas(command);
        if (!text) throw config_error("/command", "no schema for command " + command);
        schema::validate(cfg, json::parse(*text));
        if (cfg["command"] != command) throw config_error("/command", "config is for " + cfg["command"].dump());
        if (command == "transforms-check") return cmd_transforms_check(cfg);
        if (command == "sets") return cmd_sets(cfg);
        if (command == "spectral-sweep") return cmd_spectral_sweep(cfg);
        if (command == "observe") return cmd_observe(cfg, seed);
        return cmd_constants(cfg);
    } catch (const config_error& e) {
        o.code = config_failure;
        o.message = std::string("config error at ") + e.what();
    } catch (const resource_error& e) {
        o.code = resource_failure;
        o.message = std::string("resource cap exceeded: ") + e.what();
    } catch (const std::exception& e) {
        o.code = check_failure;
        o.message = std::string("run failed: ") + e.what();
    }
    o.files.clear();
    return o;
}

inline void write_outputs(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : files) {
        std::filesystem::path tmp = dir / (name + ".tmp");
        {
            std::ofstream f(tmp, std::ios::binary);
            f << text;
            if (!f) throw std::runtime_error("cannot write " + tmp.string());
        }
        std::filesystem::rename(tmp, dir / name);
    }
}

inline int run(int argc, char** argv, const SchemaSource& schemas, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"Half-line spectral and observability experiments"};
    app.require_subcommand(1);
    std::string config, out_dir = ".";
    std::optional<std::uint64_t> seed;
    const std::map<std::string, std::string> about{
        {"transforms-check", "Plancherel, involution, adjoint and frame-bound defects of the transforms"},
        {"sets", "thickness profiles, transfer constants and tail trimming"},
        {"spectral-sweep", "sharp constant C* across band positions"},
        {"observe", "observability constant from a seeded ensemble of initial data"},
        {"constants", "explicit constants from closed-form expressions"}};
    for (const auto& name : command_names()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", config, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the ensemble seed");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return config_failure;
    }
    std::string command = app.get_subcommands().front()->get_name();
    std::ifstream in(config, std::ios::binary);
    if (!in) {
        err << "config error at /: cannot read " << config << "\n";
        return config_failure;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    Outcome o = execute(command, buf.str(), schemas, seed);
    if (!o.files.empty()) {
        try {
            write_outputs(out_dir, o.files);
        } catch (const std::exception& e) {
            err << e.what() << "\n";
            return check_failure;
        }
        for (const auto& [name, _] : o.files) out << (std::filesystem::path(out_dir) / name).string() << "\n";
    }
    if (!o.message.empty()) err << o.message << "\n";
    return o.code;
}

}  // namespace halfline::cli
