#pragma once

// Killing graphs as embedded meshes in the half-space model, a mesh-based
// mean curvature oracle independent of the PDE discretization, and traces of
// solutions at the ideal boundary.

#include "hypcmc/boundary_data.hpp"
#include "hypcmc/solver.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hypcmc {

struct EmbeddedMesh {
    GridPtr grid;
    KillingFieldSpec field;
    std::vector<long> vertex_of_node;            // -1 for inactive nodes
    std::vector<std::size_t> node_of_vertex;
    std::vector<HalfSpacePoint> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;  // n = 2 only
    std::vector<Vec> normals;                    // Euclidean unit normals, <nu, Z> <= 0
};

/// vertex(xi) = killing_flow(field, u(xi), chart_embed(xi)) at every active node
/// inside the open chart.
EmbeddedMesh embed_graph(const GraphFunction& u, const KillingFieldSpec& field);

struct CurvatureField {
    std::vector<double> values;  // per vertex; NaN where flagged
    std::vector<bool> valid;

    /// max |H_est - h| over valid vertices.
    double max_deviation(double h) const;
};

/// Hyperbolic mean curvature per vertex from a quadratic fit of the
/// embedding over the 5^n parameter neighbourhood, converted through
/// H = x_{n+1} H_euc + nu_{n+1}.  Vertices without a full neighbourhood are
/// flagged.
CurvatureField numeric_mean_curvature(const EmbeddedMesh& mesh);

/// Excludes vertices whose chart point lies closer than `margin` (chart
/// coordinates) to a boundary node, or only to artificial-edge nodes.
CurvatureField restrict_to_interior(const EmbeddedMesh& mesh, const CurvatureField& field, double margin,
                                    bool artificial_only = false);

/// Vertices used by end-to-end curvature checks: a collar of width 1/4 along
/// the artificial edges is dropped in the parabolic chart, one of width 1/8
/// along the staircase cutoff in the hyperbolic chart.
CurvatureField oracle_interior(const EmbeddedMesh& mesh, const CurvatureField& field);

struct TraceReport {
    std::vector<Vec> probes;       // ideal chart points
    std::vector<double> limits;
    std::vector<double> errors;
    double max_error = 0.0;
};

/// Extrapolates u to the ideal boundary along inward grid lines through the
/// values at distances eps, 2 eps, 4 eps from the ideal edge and compares with phi.
TraceReport boundary_trace(const Solution& u, const BoundaryGraph& phi, const std::vector<Vec>& probes, double eps);

/// Default probe set: `count` equally spaced ideal points.
std::vector<Vec> default_probes(const ChartCase& chart, int count, double half_width);

/// Model-surface curvature regression: a sheet sampled on a chart box.
struct OracleCase {
    std::string name;
    SurfaceGraph graph;
    Vec lo, hi;
};

/// Fixed suite covering every model-surface variant (n = 2).
std::vector<OracleCase> model_surface_cases();
/// Seeded random parameter draws cycling through the variants (n = 2).
std::vector<OracleCase> random_model_surfaces(int count, std::uint64_t seed);

struct OracleRow {
    std::string name;
    double spacing = 0.0;
    double exact = 0.0;          // closed form w.r.t. the surface's own normal
    double max_deviation = 0.0;
    std::size_t vertices = 0;
};

/// Mesh curvature, oriented by the surface's reference normal, against the
/// closed form.  Vertices closer than `inset` to the box edge are skipped.
OracleRow run_oracle_case(const OracleCase& c, double spacing, double inset = 0.0);

}  // namespace hypcmc
