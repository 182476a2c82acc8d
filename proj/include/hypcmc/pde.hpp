#pragma once

// Discrete Killing-graph mean curvature operator.  For a graph function u on a
// chart grid the residual at an interior node is
//
//   div_g(grad u / w) - <grad u, grad gamma>_g / (2 gamma w) + n H,
//
// w = sqrt(gamma + |grad u|_g^2).  It vanishes exactly when the Killing graph
// of u has constant mean curvature H with respect to the normal eta satisfying
// <eta, Z> <= 0.  The divergence is in conservation form with staggered face
// fluxes; tangential face derivatives average the centred differences of the
// two adjacent nodes.

#include "hypcmc/grid.hpp"

#include <Eigen/SparseCore>
#include <stdexcept>

namespace hypcmc {

using SparseMatrix = Eigen::SparseMatrix<double>;

class CurvatureRangeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Throws CurvatureRangeError unless |H| < 1.
void check_curvature_range(double h);

struct ResidualField {
    GridPtr grid;
    std::vector<double> values;  // per node, zero off the interior
    double max_norm = 0.0;
    double l2_norm = 0.0;        // weighted by sqrt(det g) h^n
};

/// Centred-difference metric gradient g^{-1} du at an interior node.
Vec node_gradient(const GraphFunction& u, std::size_t node);
/// |grad u|_g at an interior node.
double gradient_norm(const GraphFunction& u, std::size_t node);
/// w = sqrt(gamma + |grad u|_g^2) at an interior node.
double flux_w(const GraphFunction& u, std::size_t node);

ResidualField residual(const GraphFunction& u, double h);

struct Linearization {
    SparseMatrix jacobian;  // d residual / d u over interior unknowns
    Eigen::VectorXd residual;
};

enum class LinearizationKind {
    Newton,
    /// w held fixed: the matrix of the lagged-coefficient (Picard) iteration,
    /// for which residual(u) = A(u) u + n H.
    FrozenCoefficients,
};

Linearization linearize(const GraphFunction& u, double h, LinearizationKind kind = LinearizationKind::Newton);

/// The lower-order term <grad u, grad gamma>_g / (2 gamma w) at a node.
double killing_term(const GraphFunction& u, std::size_t node);
/// The same term evaluated as (gamma / w) <grad u, nabla_Z Z> with the ambient
/// acceleration from Christoffel symbols.
double killing_term_direct(const GraphFunction& u, std::size_t node);

}  // namespace hypcmc
