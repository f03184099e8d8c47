#pragma once

// Report, table and mesh output. Every file carries a schema version; files are written
// to a temporary sibling and renamed into place.

#include "hyplateau/hypgeom.hpp"
#include "hyplateau/solver.hpp"
#include "hyplateau/symfunc.hpp"
#include "hyplateau/verify.hpp"

#include <json.hpp>  // vendored nlohmann/json

#include <filesystem>
#include <string>
#include <vector>

namespace hyplateau::io {

inline constexpr const char* kReportSchema = "hyplateau-report/1";
inline constexpr const char* kTableSchema = "hyplateau-table/1";
inline constexpr const char* kMeshSchema = "hyplateau-mesh/1";

nlohmann::json to_json(const symfunc::CurvatureSpec& spec);
nlohmann::json to_json(const symfunc::ConditionRecord& record);
nlohmann::json to_json(const symfunc::ConditionReport& report);
nlohmann::json to_json(const hypgeom::CapSolution& cap);
nlohmann::json to_json(const hypgeom::NuDerivativeCheck& check);
/// Deterministic statistics of a solve (no timing), suitable for byte comparison.
nlohmann::json statistics_json(const solver::SolveReport& report);
nlohmann::json to_json(const verify::GradientEstimate& g);
nlohmann::json to_json(const verify::EstimateReport& report);
nlohmann::json to_json(const verify::AlgebraReport& report);
nlohmann::json to_json(const verify::BoundStudy& study);
nlohmann::json to_json(const solver::RefineTable& table);
nlohmann::json to_json(const std::vector<solver::SweepRow>& rows);

/// Envelope {"schema", "command", "config", "result", "timing"}.
nlohmann::json envelope(const std::string& command, const nlohmann::json& config, nlohmann::json result,
                        nlohmann::json timing = nlohmann::json::object());

/// Writes `text` to `path` atomically (temporary file in the same directory, then rename).
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// Column order is fixed; the first column is the table schema version.
std::string sweep_csv(const std::vector<solver::SweepRow>& rows);
std::string refine_csv(const solver::RefineTable& table);

/// Wavefront OBJ of an n = 2 solution. Vertices are (x1, x2, u) in model units; faces are
/// triangles wound counter-clockwise when viewed from +x3, so normals point up.
/// Tensor grids: one vertex per node used by a face, Dirichlet nodes moved radially onto
/// the boundary curve at height epsilon. Radial grids: the profile revolved with `segments`
/// angular steps and a fan at the axis.
std::string mesh_obj(const solver::GraphSolution& solution, int segments = 64);

}  // namespace hyplateau::io
