#pragma once

// File artifacts: ASCII PLY and OBJ meshes, numeric CSV tables, and JSON
// summaries of scalar diagnostics.

#include "hypcmc/graph_ops.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypcmc {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MeshFormat { Ply, Obj };

MeshFormat parse_mesh_format(const std::string& name);
void export_mesh(const EmbeddedMesh& mesh, const std::string& path, MeshFormat format);

/// Numeric table with a header row and an optional leading text column.
/// Values are written with 17 significant digits so a re-read reproduces them
/// exactly.
struct ReportTable {
    std::string label_column;          // empty: no text column
    std::vector<std::string> labels;   // one per row when label_column is set
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;
};

void write_csv(const ReportTable& table, const std::string& path);
ReportTable read_csv(const std::string& path, bool labelled = false);

/// Scalar diagnostics keyed by check name plus free-form string fields.
struct Summary {
    std::map<std::string, double> scalars;
    std::map<std::string, std::string> fields;
    std::map<std::string, bool> checks;
};

void write_summary(const Summary& summary, const std::string& path);

/// Per-node solution table: node, xi_1..xi_n, u, residual, H_est.
ReportTable solution_table(const Solution& s, const CurvatureField* curvature, const EmbeddedMesh* mesh);

/// Reads u back onto `grid` from a solution table; node coordinates must match.
GraphFunction read_solution(const ReportTable& table, const GridPtr& grid);

}  // namespace hypcmc
