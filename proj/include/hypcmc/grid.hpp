#pragma once

// Uniform grids over truncated chart domains of M and grid samples of Killing
// graph functions.  Metric data are u-independent and cached per node and per
// staggered face at construction.

#include "hypcmc/geometry.hpp"
#include "hypcmc/model_surfaces.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace hypcmc {

enum class NodeKind : std::uint8_t { Interior, Boundary, Inactive };

/// Boundary nodes on the ideal edge (t = eps, or the radial cutoff) carry the
/// datum phi; artificial edges carry data chosen by the solver policy.
enum class EdgeTag : std::uint8_t { None, Ideal, Artificial };

class ChartGrid {
public:
    /// Box grid; every box face is boundary.  In the parabolic chart the face
    /// xi_n = lo[n-1] is tagged Ideal and the others Artificial.
    static ChartGrid box(const ChartCase& chart, const Vec& lo, const Vec& hi, const std::vector<int>& counts);

    /// Box grid restricted to {inside(xi)}: nodes inside whose full 3^n stencil
    /// is in the box are interior; their stencil neighbours outside are
    /// boundary nodes tagged `tag`.
    static ChartGrid masked(const ChartCase& chart, const Vec& lo, const Vec& hi, const std::vector<int>& counts,
                            const std::function<bool(const Vec&)>& inside, EdgeTag tag);

    const ChartCase& chart() const { return chart_; }
    int dim() const { return chart_.n; }
    std::size_t size() const { return kind_.size(); }
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }
    const std::vector<int>& counts() const { return counts_; }
    double spacing(int axis) const { return spacing_[axis]; }
    int stride(int axis) const { return stride_[axis]; }

    std::vector<int> multi_index(std::size_t node) const;
    std::size_t node_at(const std::vector<int>& idx) const;
    Vec coords(std::size_t node) const;

    NodeKind kind(std::size_t node) const { return kind_[node]; }
    EdgeTag tag(std::size_t node) const { return tag_[node]; }
    const std::vector<std::size_t>& interior() const { return interior_; }
    const std::vector<std::size_t>& boundary() const { return boundary_; }
    /// Position of an interior node in the unknown vector, or -1.
    long unknown(std::size_t node) const { return unknown_[node]; }

    // Cached metric data.  Face (node, a) joins node and node + e_a.
    double node_sqrt_det(std::size_t node) const { return node_sqrtg_[node]; }
    double node_gamma(std::size_t node) const { return node_gamma_[node]; }
    const double* node_ginv(std::size_t node) const { return &node_ginv_[node * nn_]; }
    const double* node_dgamma(std::size_t node) const { return &node_dgamma_[node * n_]; }
    double face_sqrt_det(std::size_t node, int a) const { return face_sqrtg_[node * n_ + a]; }
    double face_gamma(std::size_t node, int a) const { return face_gamma_[node * n_ + a]; }
    const double* face_ginv(std::size_t node, int a) const { return &face_ginv_[(node * n_ + a) * nn_]; }

    bool same_layout(const ChartGrid& other) const;

private:
    ChartGrid(const ChartCase& chart, const Vec& lo, const Vec& hi, const std::vector<int>& counts);
    void finalize();

    ChartCase chart_;
    Vec lo_, hi_;
    std::vector<int> counts_;
    std::vector<double> spacing_;
    std::vector<int> stride_;
    int n_ = 0;
    int nn_ = 0;
    std::vector<NodeKind> kind_;
    std::vector<EdgeTag> tag_;
    std::vector<std::size_t> interior_, boundary_;
    std::vector<long> unknown_;
    std::vector<double> node_sqrtg_, node_gamma_, node_ginv_, node_dgamma_;
    std::vector<double> face_sqrtg_, face_gamma_, face_ginv_;
};

using GridPtr = std::shared_ptr<const ChartGrid>;

/// Grid samples of a Killing graph function.  Inactive nodes hold 0.
struct GraphFunction {
    GridPtr grid;
    std::vector<double> u;

    GraphFunction() = default;
    GraphFunction(GridPtr g, double value = 0.0) : grid(std::move(g)), u(grid->size(), value) {}

    double operator[](std::size_t node) const { return u[node]; }
    double& operator[](std::size_t node) { return u[node]; }
};

/// Samples a surface graph at every active node; throws if a node is off the
/// sheet's domain.
GraphFunction sample_graph(const SurfaceGraph& s, const GridPtr& grid);

/// Multilinear interpolation of u at chart point xi; nullopt when the
/// enclosing cell touches an inactive node or xi is outside the box.
std::optional<double> interpolate(const GraphFunction& u, const Vec& xi);

}  // namespace hypcmc
