#pragma once

// Run configuration for the command-line front end: flat-key JSON files plus flag
// overrides, strict validation, and a normalized echo for reports.

#include "hyplateau/hypgeom.hpp"
#include "hyplateau/solver.hpp"
#include "hyplateau/symfunc.hpp"

#include <json.hpp>  // vendored nlohmann/json

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hyplateau::cli {

inline const std::vector<std::string> kCommands = {"verify-f", "solve", "sweep", "cap", "check-estimates", "refine"};
inline const std::vector<std::string> kExportFormats = {"report-json", "table-csv", "mesh-obj"};

struct RunConfig {
    std::string command;

    std::string family = "consecutive-quotient";
    int k = 1;
    std::optional<int> l;
    int n = 2;
    std::optional<int> cone;  ///< kth-root only: k+1 (default) or n

    std::string shape = "ball";
    double radius = 1.0;
    std::optional<double> a_axis;  ///< ellipse semi-axes
    std::optional<double> b_axis;

    std::optional<double> sigma;
    std::vector<double> sigmas;

    std::string grid_kind;  ///< "radial" or "tensor"; defaults by shape
    std::optional<int> grid;
    double epsilon_max = 0.1;
    double epsilon_min = 1e-3;
    double epsilon_factor = 0.5;
    double sigma_start = 0.8;
    double sigma_step = 0.05;
    std::vector<double> epsilon_schedule;  ///< filled on normalization
    std::optional<double> newton_tol;
    int max_newton_iters = 50;
    std::string jacobian = "finite_difference";
    int levels = 3;

    std::uint64_t seed = 1;
    std::size_t samples = 10000;
    int threads = 1;

    std::string out = "hyplateau-out";
    std::vector<std::string> exports = {"report-json"};
};

/// Default grid: 1024 intervals radial, 64 tensor.
int default_grid(const std::string& grid_kind);

/// Applies the keys of a flat JSON object onto `config`; unknown keys and type mismatches
/// are appended to `problems`.
void apply_json(RunConfig& config, const nlohmann::json& object, std::vector<std::string>& problems);

/// Reads and applies a config file. Throws ConfigError on I/O, parse or key problems.
void load_config_file(RunConfig& config, const std::string& path);

/// Fills defaults, checks every field and cross-field constraint, and returns the
/// normalized config. Throws ConfigError listing all violations at once.
RunConfig validate_config(RunConfig config);

nlohmann::json to_json(const RunConfig& config);

symfunc::CurvatureSpec make_spec(const RunConfig& config);
hypgeom::Domain make_domain(const RunConfig& config);
solver::SolverConfig make_solver_config(const RunConfig& config);

}  // namespace hyplateau::cli
