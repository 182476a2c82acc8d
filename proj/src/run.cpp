#include "hypcmc/run.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace hypcmc {

namespace {

using nlohmann::json;

// strict accessors: every key is checked, unknown keys are rejected

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

const json* child(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return nullptr;
    const json& c = j.at(key);
    if (!c.is_object()) throw ConfigError(where + "." + key + ": expected an object");
    return &c;
}

double number(const json& j, const char* key, const std::string& where, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": must be finite");
    return x;
}

double positive(const json& j, const char* key, const std::string& where, double fallback) {
    const double x = number(j, key, where, fallback);
    if (!(x > 0.0)) throw ConfigError(where + "." + key + ": must be positive");
    return x;
}

int integer(const json& j, const char* key, const std::string& where, int fallback, int min) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < min || x > 1000000) throw ConfigError(where + "." + key + ": out of range");
    return static_cast<int>(x);
}

bool boolean(const json& j, const char* key, const std::string& where, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) throw ConfigError(where + "." + key + ": expected true or false");
    return j.at(key).get<bool>();
}

std::string text(const json& j, const char* key, const std::string& where, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return j.at(key).get<std::string>();
}

std::vector<double> numbers(const json& j, const char* key, const std::string& where, std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return p;
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path.string() : (base / path).string();
}

Vec parse_probe(const json& v, const ChartCase& chart) {
    const int n = chart.n;
    Vec p = Vec::Zero(n);
    if (v.is_number()) {
        if (n != 2) throw ConfigError("barriers.probes: scalar probes need n = 2");
        const double x = v.get<double>();
        if (chart.kind == ChartKind::Parabolic) {
            p[0] = x;
        } else {
            p[0] = std::cos(x);
            p[1] = std::sin(x);
        }
        return p;
    }
    if (!v.is_array()) throw ConfigError("barriers.probes: expected numbers or arrays");
    const int want = chart.kind == ChartKind::Parabolic ? n - 1 : n;
    if (static_cast<int>(v.size()) != want) throw ConfigError("barriers.probes: wrong probe dimension");
    for (int a = 0; a < want; ++a) {
        if (!v[a].is_number()) throw ConfigError("barriers.probes: expected numbers");
        p[a] = v[a].get<double>();
    }
    if (chart.kind == ChartKind::Hyperbolic) {
        if (!(p.norm() > 0.0)) throw ConfigError("barriers.probes: zero direction");
        p.normalize();
    }
    return p;
}

}  // namespace

RunMode parse_mode(const std::string& name) {
    if (name == "solve") return RunMode::Solve;
    if (name == "verify") return RunMode::Verify;
    if (name == "barriers") return RunMode::Barriers;
    if (name == "oracle") return RunMode::Oracle;
    throw ConfigError("unknown mode '" + name + "' (solve, verify, barriers, oracle)");
}

std::string mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::Solve: return "solve";
        case RunMode::Verify: return "verify";
        case RunMode::Barriers: return "barriers";
        case RunMode::Oracle: return "oracle";
    }
    return "?";
}

RunConfig parse_config(const std::string& text_in, const std::filesystem::path& base) {
    json j;
    try {
        j = json::parse(text_in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown(j, "config", {"mode", "problem", "solver", "monitor", "output", "verify", "barriers", "oracle"});

    RunConfig c;
    c.mode = parse_mode(text(j, "mode", "config", "solve"));

    const json* p = child(j, "problem", "config");
    if (!p) throw ConfigError("config: missing 'problem'");
    reject_unknown(*p, "problem", {"case", "n", "H", "phi"});
    const std::string kind = text(*p, "case", "problem", "parabolic");
    if (kind == "parabolic") {
        c.chart.kind = ChartKind::Parabolic;
    } else if (kind == "hyperbolic") {
        c.chart.kind = ChartKind::Hyperbolic;
    } else {
        throw ConfigError("problem.case: expected 'parabolic' or 'hyperbolic'");
    }
    c.chart.n = integer(*p, "n", "problem", 2, 2);
    c.h = number(*p, "H", "problem", 0.0);
    if (!(std::abs(c.h) < 1.0)) throw ConfigError("problem.H: |H| must be < 1");
    if (const json* phi = child(*p, "phi", "problem")) {
        for (const auto& [key, value] : phi->items()) {
            if (key == "preset") {
                c.phi.preset = text(*phi, "preset", "problem.phi", "");
            } else if (key == "table") {
                c.phi.table_path = resolve(base, text(*phi, "table", "problem.phi", ""));
            } else {
                c.phi.params[key] = number(*phi, key.c_str(), "problem.phi", 0.0);
            }
        }
        if (c.phi.preset.empty() == c.phi.table_path.empty()) {
            throw ConfigError("problem.phi: give exactly one of 'preset' and 'table'");
        }
    } else {
        throw ConfigError("problem: missing 'phi'");
    }

    if (const json* s = child(j, "solver", "config")) {
        reject_unknown(*s, "solver", {"epsilon", "extent", "spacing", "max_iter", "abs_tol", "stage_tol", "max_h_step",
                                      "h_steps", "policy", "sensitivity", "seed"});
        auto& t = c.solver.truncation;
        t.epsilon = positive(*s, "epsilon", "solver", t.epsilon);
        t.extent = positive(*s, "extent", "solver", t.extent);
        t.spacing = positive(*s, "spacing", "solver", t.spacing);
        auto& nw = c.solver.newton;
        nw.max_iter = integer(*s, "max_iter", "solver", nw.max_iter, 1);
        nw.abs_tol = positive(*s, "abs_tol", "solver", nw.abs_tol);
        nw.stage_tol = positive(*s, "stage_tol", "solver", nw.stage_tol);
        c.solver.max_h_step = positive(*s, "max_h_step", "solver", c.solver.max_h_step);
        c.solver.h_steps = numbers(*s, "h_steps", "solver", {});
        const std::string policy = text(*s, "policy", "solver", "barrier_blend");
        if (policy == "barrier_blend") {
            c.solver.policy = ArtificialPolicy::BarrierBlend;
        } else if (policy == "constant_extension") {
            c.solver.policy = ArtificialPolicy::ConstantExtension;
        } else {
            throw ConfigError("solver.policy: expected 'barrier_blend' or 'constant_extension'");
        }
        c.solver.sensitivity = boolean(*s, "sensitivity", "solver", false);
        const std::string seed = text(*s, "seed", "solver", "harmonic");
        if (seed == "harmonic") {
            c.seed = SeedKind::Harmonic;
        } else if (seed == "sub") {
            c.seed = SeedKind::Sub;
        } else if (seed == "super") {
            c.seed = SeedKind::Super;
        } else {
            throw ConfigError("solver.seed: expected 'harmonic', 'sub' or 'super'");
        }
    }
    if (c.chart.kind == ChartKind::Hyperbolic && !(c.solver.truncation.epsilon < 1.0)) {
        throw ConfigError("solver.epsilon: must be below 1 in the hyperbolic chart");
    }

    if (const json* m = child(j, "monitor", "config")) {
        reject_unknown(*m, "monitor", {"gradient_margin", "trace_probes", "trace_half_width"});
        c.gradient_margin = positive(*m, "gradient_margin", "monitor", c.gradient_margin);
        c.trace.probes = integer(*m, "trace_probes", "monitor", c.trace.probes, 1);
        c.trace.half_width = positive(*m, "trace_half_width", "monitor", c.trace.half_width);
    }

    if (const json* o = child(j, "output", "config")) {
        reject_unknown(*o, "output", {"mesh", "formats", "report", "summary"});
        c.output.mesh = resolve(base, text(*o, "mesh", "output", ""));
        c.output.report = resolve(base, text(*o, "report", "output", ""));
        c.output.summary = resolve(base, text(*o, "summary", "output", ""));
        if (o->contains("formats")) {
            if (!o->at("formats").is_array()) throw ConfigError("output.formats: expected an array");
            for (const auto& f : o->at("formats")) {
                if (!f.is_string()) throw ConfigError("output.formats: expected strings");
                try {
                    c.output.formats.push_back(parse_mesh_format(f.get<std::string>()));
                } catch (const IoError& e) {
                    throw ConfigError(std::string("output.formats: ") + e.what());
                }
            }
        } else if (!c.output.mesh.empty()) {
            c.output.formats.push_back(MeshFormat::Ply);
        }
    }

    if (const json* v = child(j, "verify", "config")) {
        reject_unknown(*v, "verify", {"solution", "residual_tol", "oracle_tol", "trace_tol", "sandwich_tol"});
        c.verify.solution = resolve(base, text(*v, "solution", "verify", ""));
        c.verify.residual_tol = positive(*v, "residual_tol", "verify", c.verify.residual_tol);
        c.verify.oracle_tol = positive(*v, "oracle_tol", "verify", c.verify.oracle_tol);
        c.verify.trace_tol = positive(*v, "trace_tol", "verify", c.verify.trace_tol);
        c.verify.sandwich_tol = positive(*v, "sandwich_tol", "verify", c.verify.sandwich_tol);
    }
    if (c.mode == RunMode::Verify && c.verify.solution.empty()) throw ConfigError("verify.solution: required in verify mode");

    if (const json* b = child(j, "barriers", "config")) {
        reject_unknown(*b, "barriers", {"probes", "k_max", "stagnation", "tolerance", "check_solution"});
        if (b->contains("probes")) {
            if (!b->at("probes").is_array()) throw ConfigError("barriers.probes: expected an array");
            for (const auto& v : b->at("probes")) c.barriers.probes.push_back(parse_probe(v, c.chart));
        }
        c.barriers.sequence.k_max = integer(*b, "k_max", "barriers", c.barriers.sequence.k_max, 1);
        c.barriers.sequence.stagnation = positive(*b, "stagnation", "barriers", c.barriers.sequence.stagnation);
        c.barriers.sequence.tolerance = positive(*b, "tolerance", "barriers", c.barriers.sequence.tolerance);
        c.barriers.check_solution = boolean(*b, "check_solution", "barriers", true);
    }

    if (const json* o = child(j, "oracle", "config")) {
        reject_unknown(*o, "oracle", {"spacings", "random_draws", "seed", "tolerance"});
        c.oracle.spacings = numbers(*o, "spacings", "oracle", c.oracle.spacings);
        if (c.oracle.spacings.empty()) throw ConfigError("oracle.spacings: must not be empty");
        for (double s : c.oracle.spacings) {
            if (!(s > 0.0 && s <= 0.25)) throw ConfigError("oracle.spacings: values must lie in (0, 1/4]");
        }
        c.oracle.random_draws = integer(*o, "random_draws", "oracle", 0, 0);
        c.oracle.seed = static_cast<std::uint64_t>(integer(*o, "seed", "oracle", 1, 0));
        c.oracle.tolerance = positive(*o, "tolerance", "oracle", c.oracle.tolerance);
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path());
}

namespace {

struct Analysis {
    Summary summary;
    ReportTable table;
    std::optional<EmbeddedMesh> mesh;
};

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
    return out;
}

Analysis analyze(const Solution& s, const AsymptoticProblem& problem, const RunConfig& cfg) {
    Analysis a;
    Summary& sum = a.summary;
    const ChartGrid& g = *s.u.grid;
    const ResidualField r = residual(s.u, s.h);
    sum.scalars["residual_max"] = r.max_norm;
    sum.scalars["residual_l2"] = r.l2_norm;
    sum.scalars["H"] = s.h;
    sum.scalars["spacing"] = cfg.solver.truncation.spacing;
    sum.scalars["epsilon"] = cfg.solver.truncation.epsilon;
    sum.scalars["newton_steps"] = s.diagnostics.newton_steps;

    double oracle = std::numeric_limits<double>::quiet_NaN();
    CurvatureField curvature;
    if (g.dim() == 2) {
        a.mesh = embed_graph(s.u, g.chart().field());
        curvature = oracle_interior(*a.mesh, numeric_mean_curvature(*a.mesh));
        oracle = curvature.max_deviation(s.h);
    }
    sum.scalars["oracle_H_max_dev"] = oracle;

    const TraceReport trace = boundary_trace(s, problem.phi, default_probes(g.chart(), cfg.trace.probes, cfg.trace.half_width),
                                             cfg.solver.truncation.epsilon);
    sum.scalars["trace_max_err"] = trace.max_error;

    const SandwichMargins m = sandwich_margins(problem, s.u);
    sum.scalars["sandwich_lower"] = m.lower;
    sum.scalars["sandwich_upper"] = m.upper;
    sum.scalars["sandwich_min_margin"] = std::min(m.lower, m.upper);
    sum.scalars["gradient_sup"] = gradient_monitor(s, cfg.gradient_margin).sup;
    if (s.diagnostics.sensitivity) sum.scalars["truncation_sensitivity"] = *s.diagnostics.sensitivity;

    sum.fields["case"] = g.chart().kind == ChartKind::Parabolic ? "parabolic" : "hyperbolic";
    sum.fields["phi"] = problem.phi.name();
    sum.fields["warnings"] = join(s.diagnostics.warnings);

    sum.checks["residual"] = r.max_norm <= cfg.verify.residual_tol;
    sum.checks["oracle"] = !(oracle > cfg.verify.oracle_tol);
    sum.checks["trace"] = trace.max_error <= cfg.verify.trace_tol;
    sum.checks["sandwich"] = std::min(m.lower, m.upper) >= -cfg.verify.sandwich_tol;

    a.table = solution_table(s, a.mesh ? &curvature : nullptr, a.mesh ? &*a.mesh : nullptr);
    return a;
}

std::string describe_failure(const std::string& check, const Summary& s, const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(6);
    if (check == "residual") {
        os << "residual check failed: residual_max = " << s.scalars.at("residual_max") << " > " << cfg.verify.residual_tol;
    } else if (check == "oracle") {
        os << "oracle check failed: oracle_H_max_dev = " << s.scalars.at("oracle_H_max_dev") << " > "
           << cfg.verify.oracle_tol;
    } else if (check == "trace") {
        os << "trace check failed: trace_max_err = " << s.scalars.at("trace_max_err") << " > " << cfg.verify.trace_tol;
    } else if (check == "sandwich") {
        os << "sandwich check failed: sandwich_min_margin = " << s.scalars.at("sandwich_min_margin") << " < "
           << -cfg.verify.sandwich_tol;
    } else {
        os << check << " check failed";
    }
    return os.str();
}

int report_checks(const Summary& s, const RunConfig& cfg, std::ostream& log) {
    int failed = 0;
    for (const auto& [name, ok] : s.checks) {
        if (ok) continue;
        log << describe_failure(name, s, cfg) << '\n';
        ++failed;
    }
    return failed;
}

AsymptoticProblem make_problem(const RunConfig& cfg) {
    try {
        BoundaryGraph phi = make_boundary_graph(cfg.chart, cfg.phi);
        validate_boundary(phi);
        return {cfg.chart, std::move(phi), cfg.h};
    } catch (const BoundaryError& e) {
        throw ConfigError(std::string("problem.phi: ") + e.what());
    }
}

void write_mesh(const EmbeddedMesh& mesh, const OutputConfig& out) {
    if (out.mesh.empty()) return;
    for (MeshFormat f : out.formats) export_mesh(mesh, out.mesh + (f == MeshFormat::Ply ? ".ply" : ".obj"), f);
}

void write_outputs(const Summary& s, const ReportTable* table, const OutputConfig& out) {
    if (table && !out.report.empty()) write_csv(*table, out.report);
    if (!out.summary.empty()) write_summary(s, out.summary);
}

int run_solve(const RunConfig& cfg, std::ostream& log) {
    const AsymptoticProblem problem = make_problem(cfg);
    const Solution s = asymptotic_solve(problem, cfg.solver, cfg.seed);
    Analysis a = analyze(s, problem, cfg);
    a.summary.fields["mode"] = "solve";
    for (const auto& w : s.diagnostics.warnings) log << "warning: " << w << '\n';
    if (a.mesh) write_mesh(*a.mesh, cfg.output);
    write_outputs(a.summary, &a.table, cfg.output);
    log << "solve: residual_max " << a.summary.scalars["residual_max"] << ", oracle_H_max_dev "
        << a.summary.scalars["oracle_H_max_dev"] << ", trace_max_err " << a.summary.scalars["trace_max_err"]
        << ", sandwich_min_margin " << a.summary.scalars["sandwich_min_margin"] << '\n';
    return exit_code::ok;
}

int run_verify(const RunConfig& cfg, std::ostream& log) {
    const AsymptoticProblem problem = make_problem(cfg);
    const GridPtr grid = asymptotic_grid(cfg.chart, cfg.solver.truncation);
    Solution s;
    try {
        s.u = read_solution(read_csv(cfg.verify.solution), grid);
    } catch (const IoError& e) {
        throw ConfigError(std::string("verify.solution: ") + e.what());
    }
    s.h = cfg.h;
    Analysis a = analyze(s, problem, cfg);
    a.summary.fields["mode"] = "verify";
    write_outputs(a.summary, &a.table, cfg.output);
    if (report_checks(a.summary, cfg, log) > 0) return exit_code::verification;
    log << "verify: all checks passed\n";
    return exit_code::ok;
}

std::string probe_label(const ChartCase& chart, const Vec& p) {
    std::ostringstream os;
    os.precision(6);
    if (chart.kind == ChartKind::Hyperbolic && chart.n == 2) {
        double theta = std::atan2(p[1], p[0]);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        os << "theta=" << theta;
        return os.str();
    }
    os << "x0=";
    const int m = chart.kind == ChartKind::Parabolic ? chart.n - 1 : chart.n;
    for (int a = 0; a < m; ++a) os << (a ? ";" : "") << p[a];
    return os.str();
}

int run_barriers(const RunConfig& cfg, std::ostream& log) {
    const AsymptoticProblem problem = make_problem(cfg);
    std::optional<Solution> s;
    if (cfg.barriers.check_solution) s = asymptotic_solve(problem, cfg.solver, cfg.seed);
    std::vector<Vec> probes = cfg.barriers.probes;
    if (probes.empty()) probes = default_probes(cfg.chart, cfg.trace.probes, cfg.trace.half_width);

    ReportTable table;
    table.label_column = "probe";
    table.columns = {"k", "sigma", "w", "gap"};
    Summary sum;
    sum.fields["mode"] = "barriers";
    bool decreasing = true;
    bool sandwich = true;
    double min_margin = std::numeric_limits<double>::infinity();
    double max_final_gap = 0.0;
    for (const Vec& p : probes) {
        const BarrierCertificate c = barrier_sequence(p, problem.phi, cfg.h, cfg.barriers.sequence, s ? &*s : nullptr);
        const auto gaps = c.gaps();
        const std::string label = probe_label(cfg.chart, p);
        for (std::size_t k = 0; k < gaps.size(); ++k) {
            table.labels.push_back(label);
            table.rows.push_back({static_cast<double>(k), c.sigma[k], c.w[k], gaps[k]});
            if (k > 0 && gaps[k - 1] > cfg.barriers.sequence.stagnation && !(gaps[k] < gaps[k - 1])) decreasing = false;
        }
        max_final_gap = std::max(max_final_gap, gaps.back());
        if (c.sandwich.checked) {
            min_margin = std::min({min_margin, c.sandwich.lower_margin, c.sandwich.upper_margin});
            sandwich = sandwich && c.sandwich.violations == 0;
        }
        log << "probe " << label << ": " << gaps.size() << " steps, final gap " << gaps.back() << " (" << c.stop_reason
            << ")\n";
    }
    sum.scalars["max_final_gap"] = max_final_gap;
    sum.scalars["sandwich_min_margin"] = std::isfinite(min_margin) ? min_margin : std::numeric_limits<double>::quiet_NaN();
    sum.scalars["probes"] = static_cast<double>(probes.size());
    sum.checks["gaps_decreasing"] = decreasing;
    if (s) sum.checks["sandwich"] = sandwich;
    write_outputs(sum, &table, cfg.output);
    int failed = 0;
    if (!decreasing) {
        log << "gaps_decreasing check failed: a certificate gap did not strictly decrease\n";
        ++failed;
    }
    if (s && !sandwich) {
        log << "sandwich check failed: sigma_K <= u <= w_K violated (min margin " << min_margin << ")\n";
        ++failed;
    }
    return failed ? exit_code::verification : exit_code::ok;
}

int run_oracle(const RunConfig& cfg, std::ostream& log) {
    auto cases = model_surface_cases();
    if (cfg.oracle.random_draws > 0) {
        auto extra = random_model_surfaces(cfg.oracle.random_draws, cfg.oracle.seed);
        cases.insert(cases.end(), extra.begin(), extra.end());
    }
    ReportTable table;
    table.label_column = "surface";
    table.columns = {"spacing", "exact_H", "max_deviation", "vertices"};
    double finest = *std::min_element(cfg.oracle.spacings.begin(), cfg.oracle.spacings.end());
    double worst = 0.0;
    std::string worst_name;
    for (const auto& c : cases) {
        for (double h : cfg.oracle.spacings) {
            const OracleRow r = run_oracle_case(c, h);
            table.labels.push_back(r.name);
            table.rows.push_back({r.spacing, r.exact, r.max_deviation, static_cast<double>(r.vertices)});
            if (h == finest && r.max_deviation >= worst) {
                worst = r.max_deviation;
                worst_name = r.name;
            }
        }
    }
    Summary sum;
    sum.fields["mode"] = "oracle";
    sum.fields["worst_surface"] = worst_name;
    sum.scalars["oracle_H_max_dev"] = worst;
    sum.scalars["spacing"] = finest;
    sum.scalars["surfaces"] = static_cast<double>(cases.size());
    sum.checks["oracle"] = worst <= cfg.oracle.tolerance;
    write_outputs(sum, &table, cfg.output);
    if (worst > cfg.oracle.tolerance) {
        log << "oracle check failed: " << worst_name << " deviates by " << worst << " > " << cfg.oracle.tolerance << '\n';
        return exit_code::verification;
    }
    log << "oracle: " << cases.size() << " surfaces, max deviation " << worst << " at spacing " << finest << '\n';
    return exit_code::ok;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
    switch (cfg.mode) {
        case RunMode::Solve: return run_solve(cfg, log);
        case RunMode::Verify: return run_verify(cfg, log);
        case RunMode::Barriers: return run_barriers(cfg, log);
        case RunMode::Oracle: return run_oracle(cfg, log);
    }
    return exit_code::config;
}

int run_file(const std::string& path, const std::string& mode_override, std::ostream& log) {
    try {
        RunConfig cfg = load_config(path);
        if (!mode_override.empty()) {
            cfg.mode = parse_mode(mode_override);
            if (cfg.mode == RunMode::Verify && cfg.verify.solution.empty()) {
                throw ConfigError("verify.solution: required in verify mode");
            }
        }
        return run(cfg, log);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return exit_code::config;
    } catch (const IoError& e) {
        log << "output error: " << e.what() << '\n';
        return exit_code::config;
    } catch (const SolverError& e) {
        log << "solver failure: " << e.what() << '\n';
        return exit_code::solver;
    } catch (const CurvatureRangeError& e) {
        log << "config error: " << e.what() << '\n';
        return exit_code::config;
    } catch (const std::exception& e) {
        log << "solver failure: " << e.what() << '\n';
        return exit_code::solver;
    }
}

}  // namespace hypcmc
