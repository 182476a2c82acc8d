#pragma once

// Configuration-driven runs behind the hypcmc command line tool.  A run is a
// single JSON document; relative paths in it resolve against its directory.

#include "hypcmc/perron.hpp"
#include "hypcmc/report.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypcmc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RunMode { Solve, Verify, Barriers, Oracle };

RunMode parse_mode(const std::string& name);
std::string mode_name(RunMode mode);

struct OutputConfig {
    std::string mesh;                  // path stem; one file per format
    std::vector<MeshFormat> formats;
    std::string report;                // CSV
    std::string summary;               // JSON
};

struct VerifyConfig {
    std::string solution;              // CSV written by a solve run
    double residual_tol = 1e-8;
    double oracle_tol = 0.05;
    double trace_tol = 0.05;
    double sandwich_tol = 1e-8;
};

struct TraceConfig {
    int probes = 5;
    double half_width = 1.0;           // parabolic probe window
};

struct BarrierConfig {
    std::vector<Vec> probes;           // empty: default probes
    SequenceOptions sequence;
    bool check_solution = true;
};

struct OracleConfig {
    std::vector<double> spacings{1.0 / 32.0, 1.0 / 64.0};
    int random_draws = 0;
    std::uint64_t seed = 1;
    double tolerance = 0.01;
};

struct RunConfig {
    RunMode mode = RunMode::Solve;
    ChartCase chart{ChartKind::Parabolic, 2};
    BoundarySpec phi;
    double h = 0.0;
    SeedKind seed = SeedKind::Harmonic;
    SolverConfig solver;
    double gradient_margin = 0.25;
    TraceConfig trace;
    OutputConfig output;
    VerifyConfig verify;
    BarrierConfig barriers;
    OracleConfig oracle;
};

/// Parses and validates a config document; throws ConfigError naming the key.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::string& path);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int solver = 2;
inline constexpr int verification = 3;
}  // namespace exit_code

/// Executes the configured mode, writes the artifacts and returns the exit
/// status.  Progress and failed checks go to `log`.
int run(const RunConfig& config, std::ostream& log);

/// Full CLI entry: load, optional mode override, run.  Config and I/O errors
/// map to exit 1, solver failures to exit 2.
int run_file(const std::string& path, const std::string& mode_override, std::ostream& log);

}  // namespace hypcmc
