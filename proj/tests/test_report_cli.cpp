#include "support.hpp"

#include "hypcmc/report.hpp"
#include "hypcmc/run.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hypcmc;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hypcmc_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HYPCMC_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kConstant = R"({"mode": "solve",
  "problem": {"case": "parabolic", "n": 2, "H": 0, "phi": {"preset": "constant", "a": 1}},
  "solver": {"spacing": 0.0625},
  "output": {"mesh": "plane", "formats": ["ply", "obj"], "report": "sol.csv", "summary": "sum.json"}})";

const char* kBump = R"({"mode": "solve",
  "problem": {"case": "parabolic", "n": 2, "H": 0.3, "phi": {"preset": "bump", "a": 1, "b": 0.5}},
  "solver": {"spacing": 0.0625},
  "output": {"report": "bump.csv", "summary": "bump.json"},
  "verify": {"solution": "bump.csv"}})";

}  // namespace

TEST(ExportMesh, ThreeByThreePlane) {
    const fs::path dir = scratch("ply");
    const GridPtr g = box_grid(parabolic(), vec({-1, 1}), vec({1, 3}), 1.0);
    ASSERT_EQ(g->size(), 9u);
    const EmbeddedMesh mesh = embed_graph(GraphFunction(g, 0.5), parabolic().field());
    EXPECT_EQ(mesh.triangles.size(), 8u);

    export_mesh(mesh, (dir / "m.ply").string(), MeshFormat::Ply);
    std::istringstream ply(slurp(dir / "m.ply"));
    std::string line;
    std::vector<std::string> header;
    while (std::getline(ply, line) && line != "end_header") header.push_back(line);
    EXPECT_EQ(header.front(), "ply");
    EXPECT_EQ(header[1], "format ascii 1.0");
    EXPECT_NE(std::find(header.begin(), header.end(), "element vertex 9"), header.end());
    EXPECT_NE(std::find(header.begin(), header.end(), "element face 8"), header.end());
    EXPECT_NE(std::find(header.begin(), header.end(), "property float64 x"), header.end());
    EXPECT_NE(std::find(header.begin(), header.end(), "property list uchar int vertex_indices"), header.end());
    for (int v = 0; v < 9; ++v) {
        double x, y, z;
        ply >> x >> y >> z;
        EXPECT_EQ(x, 0.5);
        EXPECT_GE(z, 1.0);
    }
    for (int f = 0; f < 8; ++f) {
        int k, a, b, c;
        ply >> k >> a >> b >> c;
        EXPECT_EQ(k, 3);
        for (int i : {a, b, c}) {
            EXPECT_GE(i, 0);
            EXPECT_LT(i, 9);
        }
    }

    export_mesh(mesh, (dir / "m.obj").string(), MeshFormat::Obj);
    std::istringstream obj(slurp(dir / "m.obj"));
    int vs = 0, fs_ = 0;
    while (std::getline(obj, line)) {
        if (line.rfind("v ", 0) == 0) ++vs;
        if (line.rfind("f ", 0) == 0) {
            ++fs_;
            std::istringstream f(line.substr(2));
            int i;
            while (f >> i) {
                EXPECT_GE(i, 1);
                EXPECT_LE(i, 9);
            }
        }
    }
    EXPECT_EQ(vs, 9);
    EXPECT_EQ(fs_, 8);
}

TEST(ExportMesh, FormatNamesAndIoErrors) {
    EXPECT_EQ(parse_mesh_format("ply"), MeshFormat::Ply);
    EXPECT_EQ(parse_mesh_format("obj"), MeshFormat::Obj);
    EXPECT_ANY_THROW(parse_mesh_format("stl"));
    const GridPtr g = box_grid(parabolic(), vec({-1, 1}), vec({1, 3}), 1.0);
    const EmbeddedMesh mesh = embed_graph(GraphFunction(g, 0.5), parabolic().field());
    try {
        export_mesh(mesh, "/nonexistent/dir/m.ply", MeshFormat::Ply);
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/m.ply"), std::string::npos);
    }
}

TEST(Csv, RoundTripIsExact) {
    const fs::path dir = scratch("csv");
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    ReportTable t;
    t.label_column = "name";
    t.columns = {"a", "b", "c"};
    for (int i = 0; i < 50; ++i) {
        t.labels.push_back("row" + std::to_string(i));
        t.rows.push_back({d(rng), d(rng) * 1e-300, std::ldexp(d(rng), -1070)});
    }
    t.rows.push_back({std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(), -0.0});
    t.labels.push_back("special");
    write_csv(t, (dir / "t.csv").string());
    const ReportTable back = read_csv((dir / "t.csv").string(), true);
    ASSERT_EQ(back.columns, t.columns);
    ASSERT_EQ(back.labels, t.labels);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_LE(std::abs(back.rows[i][j] - t.rows[i][j]), 1e-15 * std::abs(t.rows[i][j]));
        }
    }
    EXPECT_TRUE(std::isnan(back.rows.back()[0]));
    EXPECT_EQ(back.rows.back()[1], std::numeric_limits<double>::infinity());
    EXPECT_EQ(back.column("b"), 1u);
}

TEST(Csv, SolutionTableRoundTrip) {
    const fs::path dir = scratch("soltable");
    const GridPtr g = box_grid(parabolic(), vec({-1, 0.25}), vec({1, 1.25}), 1.0 / 8);
    const SurfaceGraph s = surface_as_graph(ModelSurface::hemisphere(vec({0, 0}), 3.0), parabolic());
    const Solution sol = dirichlet_solve(g, 0.0, sample_graph(s, g), SolverConfig{});
    write_csv(solution_table(sol, nullptr, nullptr), (dir / "s.csv").string());
    const ReportTable t = read_csv((dir / "s.csv").string());
    EXPECT_EQ(t.columns, (std::vector<std::string>{"node", "xi_1", "xi_2", "u", "residual", "H_est"}));
    const GraphFunction u = read_solution(t, g);
    for (std::size_t node = 0; node < g->size(); ++node) EXPECT_EQ(u[node], sol.u[node]);
    const GridPtr other = box_grid(parabolic(), vec({-1, 0.25}), vec({1, 1.25}), 1.0 / 4);
    EXPECT_ANY_THROW(read_solution(t, other));
}

TEST(Summary, JsonSchema) {
    const fs::path dir = scratch("summary");
    Summary s;
    s.scalars = {{"residual_max", 1e-12}, {"oracle_H_max_dev", 0.01}, {"trace_max_err", 0.02},
                 {"sandwich_min_margin", 0.0}, {"sensitivity", std::numeric_limits<double>::quiet_NaN()}};
    s.fields["case"] = "parabolic";
    s.checks["residual"] = true;
    write_summary(s, (dir / "s.json").string());
    const auto j = nlohmann::json::parse(slurp(dir / "s.json"));
    for (const char* k : {"residual_max", "oracle_H_max_dev", "trace_max_err", "sandwich_min_margin"}) {
        EXPECT_TRUE(j.contains(k)) << k;
        EXPECT_TRUE(j[k].is_number()) << k;
    }
    EXPECT_TRUE(j["sensitivity"].is_null());
    EXPECT_EQ(j["case"], "parabolic");
    EXPECT_EQ(j["checks"]["residual"], true);
}

TEST(Config, ParsesAndRejects) {
    const RunConfig c = parse_config(kBump, "/base");
    EXPECT_EQ(c.mode, RunMode::Solve);
    EXPECT_EQ(c.h, 0.3);
    EXPECT_EQ(c.phi.preset, "bump");
    EXPECT_EQ(c.solver.truncation.spacing, 0.0625);
    EXPECT_EQ(fs::path(c.output.report), fs::path("/base/bump.csv"));
    EXPECT_THROW(parse_config("{not json"), ConfigError);
    EXPECT_THROW(parse_config(R"({"problem": {"case": "parabolic", "H": 1.0, "phi": {"preset": "constant"}}})"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({"problem": {"case": "elliptic", "phi": {"preset": "constant"}}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"problem": {"case": "parabolic", "n": 1, "phi": {"preset": "constant"}}})"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({"problem": {"case": "parabolic", "phi": {"preset": "constant"}}, "extra": 1})"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({"mode": "dance", "problem": {"case": "parabolic", "phi": {"preset": "constant"}}})"),
                 ConfigError);
    EXPECT_THROW(parse_mode("certify"), ConfigError);
    for (RunMode m : {RunMode::Solve, RunMode::Verify, RunMode::Barriers, RunMode::Oracle}) {
        EXPECT_EQ(parse_mode(mode_name(m)), m);
    }
}

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch("cli_exit");
    EXPECT_EQ(run_cli("--config " + (dir / "missing.json").string()), exit_code::config);
    spit(dir / "bad.json", R"({"problem": {"case": "parabolic", "H": 1.5, "phi": {"preset": "constant"}}})");
    EXPECT_EQ(run_cli("--config " + (dir / "bad.json").string()), exit_code::config);
    EXPECT_EQ(run_cli("--mode solve"), exit_code::config);
    spit(dir / "c.json", kConstant);
    EXPECT_EQ(run_cli("--config " + (dir / "c.json").string() + " --mode explode"), exit_code::config);
    // a Newton budget of one step cannot reach the tolerance
    spit(dir / "starved.json", R"({"problem": {"case": "parabolic", "H": 0.6,
        "phi": {"preset": "bump", "a": 1, "b": 0.5}}, "solver": {"spacing": 0.0625, "max_iter": 1}})");
    EXPECT_EQ(run_cli("--config " + (dir / "starved.json").string()), exit_code::solver);
}

TEST(Cli, SolveConstantWritesPlane) {
    const fs::path dir = scratch("cli_const");
    spit(dir / "c.json", kConstant);
    ASSERT_EQ(run_cli("--config " + (dir / "c.json").string()), exit_code::ok);
    const auto j = nlohmann::json::parse(slurp(dir / "sum.json"));
    EXPECT_LT(j["residual_max"].get<double>(), 1e-10);
    ASSERT_TRUE(fs::exists(dir / "plane.ply"));
    ASSERT_TRUE(fs::exists(dir / "plane.obj"));
    std::istringstream obj(slurp(dir / "plane.obj"));
    std::string line;
    while (std::getline(obj, line)) {
        if (line.rfind("v ", 0) != 0) continue;
        std::istringstream v(line.substr(2));
        double x;
        v >> x;
        EXPECT_NEAR(x, 1.0, 1e-12);
    }
}

TEST(Cli, BumpReportsSandwichAndOracle) {
    const fs::path dir = scratch("cli_bump");
    spit(dir / "b.json", kBump);
    std::ostringstream log;
    ASSERT_EQ(run_file((dir / "b.json").string(), "", log), exit_code::ok);
    const auto j = nlohmann::json::parse(slurp(dir / "bump.json"));
    for (const char* k : {"residual_max", "oracle_H_max_dev", "trace_max_err", "sandwich_min_margin",
                          "sandwich_lower", "sandwich_upper"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_LE(j["residual_max"].get<double>(), 1e-8);
    EXPECT_GE(j["sandwich_min_margin"].get<double>(), -1e-8);
    EXPECT_EQ(run_file((dir / "b.json").string(), "verify", log), exit_code::ok);
}

TEST(Cli, VerifyFlagsTamperedSolution) {
    const fs::path dir = scratch("cli_tamper");
    spit(dir / "b.json", kBump);
    std::ostringstream log;
    ASSERT_EQ(run_file((dir / "b.json").string(), "", log), exit_code::ok);
    ReportTable t = read_csv((dir / "bump.csv").string());
    const std::size_t col = t.column("u");
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    for (auto& row : t.rows) row[col] += noise(rng);
    write_csv(t, (dir / "bump.csv").string());
    std::ostringstream vlog;
    EXPECT_EQ(run_file((dir / "b.json").string(), "verify", vlog), exit_code::verification);
    EXPECT_NE(vlog.str().find("residual check failed"), std::string::npos) << vlog.str();
    EXPECT_EQ(run_cli("--config " + (dir / "b.json").string() + " --mode verify"), exit_code::verification);
}

TEST(Cli, BarriersAndOracleModes) {
    const fs::path dir = scratch("cli_modes");
    spit(dir / "bar.json", R"({"mode": "barriers",
      "problem": {"case": "parabolic", "H": 0.3, "phi": {"preset": "bump", "a": 1, "b": 0.5}},
      "solver": {"spacing": 0.0625},
      "barriers": {"probes": [0.5, -0.7], "k_max": 6},
      "output": {"report": "bar.csv", "summary": "bar.json"}})");
    std::ostringstream log;
    EXPECT_EQ(run_file((dir / "bar.json").string(), "", log), exit_code::ok) << log.str();
    const ReportTable bar = read_csv((dir / "bar.csv").string(), true);
    EXPECT_EQ(bar.columns, (std::vector<std::string>{"k", "sigma", "w", "gap"}));
    EXPECT_FALSE(bar.rows.empty());

    spit(dir / "orc.json", R"({"mode": "oracle",
      "problem": {"case": "parabolic", "phi": {"preset": "constant"}},
      "oracle": {"random_draws": 3, "seed": 4, "spacings": [0.03125]},
      "output": {"report": "orc.csv", "summary": "orc.json"}})");
    EXPECT_EQ(run_file((dir / "orc.json").string(), "", log), exit_code::ok) << log.str();
    const ReportTable orc = read_csv((dir / "orc.csv").string(), true);
    EXPECT_EQ(orc.columns, (std::vector<std::string>{"spacing", "exact_H", "max_deviation", "vertices"}));
    EXPECT_EQ(orc.rows.size(), model_surface_cases().size() + 3);
}

TEST(Cli, IdenticalRunsAreByteIdentical) {
    const fs::path a = scratch("cli_det_a"), b = scratch("cli_det_b");
    spit(a / "b.json", kBump);
    spit(b / "b.json", kBump);
    ASSERT_EQ(run_cli("--config " + (a / "b.json").string()), exit_code::ok);
    ASSERT_EQ(run_cli("--config " + (b / "b.json").string()), exit_code::ok);
    EXPECT_EQ(slurp(a / "bump.csv"), slurp(b / "bump.csv"));
    EXPECT_EQ(slurp(a / "bump.json"), slurp(b / "bump.json"));
}
