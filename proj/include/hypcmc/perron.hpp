#pragma once

// Barrier machinery for boundary attainment: piecewise sub/supersolutions
// built from model-surface sheets, the minimal lifts and H descents at an
// ideal probe point, and local Dirichlet lifts on geodesic balls.

#include "hypcmc/solver.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hypcmc {

enum class BarrierKind { Sub, Super };

struct GeodesicBallSpec {
    Vec center;  // chart point of M
    double radius = 0.0;
};

/// Local solution replacing a barrier inside a geodesic ball.
struct BallPatch {
    GeodesicBallSpec ball;
    GraphFunction local;
};

/// Base function plus an ordered list of patches.  A sheet patch is combined
/// by max (Sub) or min (Super) on its graph domain; a ball patch replaces the
/// value inside its ball.
class PiecewiseBarrier {
public:
    using Base = std::function<std::optional<double>(const Vec&)>;
    using Patch = std::variant<SurfaceGraph, BallPatch>;

    PiecewiseBarrier(BarrierKind kind, const SurfaceGraph& base);
    PiecewiseBarrier(BarrierKind kind, ChartCase chart, Base base, std::string name);

    BarrierKind kind() const { return kind_; }
    const ChartCase& chart() const { return chart_; }
    const std::string& name() const { return name_; }
    const std::vector<Patch>& patches() const { return patches_; }

    std::optional<double> value(const Vec& xi) const;
    /// Throws DomainError where the base is undefined.
    double operator()(const Vec& xi) const;

    PiecewiseBarrier with_sheet(const SurfaceGraph& sheet) const;
    PiecewiseBarrier with_ball(BallPatch patch) const;

private:
    BarrierKind kind_;
    ChartCase chart_;
    Base base_;
    std::string name_;
    std::vector<Patch> patches_;
};

/// Ideal point of R^n reached by flowing the ideal probe xi0 for time v.
/// Parabolic probes are (y0, 0); hyperbolic probes are unit vectors.
Vec ideal_point(const ChartCase& chart, const Vec& probe, double v);

struct LiftStep {
    PiecewiseBarrier barrier;
    bool terminal = false;   // Gamma reached: the input is returned unchanged
    IdealSphere sphere;      // E_k (radius 0 when terminal)
};

/// Minimal lift: patches sigma by the far sheet of the hypersphere with
/// curvature min(H, 0) (the totally geodesic one for H >= 0) over the
/// biggest ideal sphere about Psi(sigma(x0), x0) on the side of M.
LiftStep sub_lift(const PiecewiseBarrier& sigma, const Vec& probe, const BoundaryGraph& gamma, double h = 0.0);

/// H descent: patches w by the near sheet of the CMC-max(H, 0) hypersphere
/// over the biggest ideal sphere about Psi(w(x0), x0) on the far side of Gamma.
LiftStep super_descent(const PiecewiseBarrier& w, const Vec& probe, const BoundaryGraph& gamma, double h);

struct SandwichCheck {
    bool checked = false;
    double lower_margin = 0.0;  // min(u - sigma_K) over shared nodes
    double upper_margin = 0.0;  // min(w_K - u)
    std::size_t violations = 0;
    std::size_t nodes = 0;
};

struct BarrierCertificate {
    Vec probe;
    double target = 0.0;          // phi(x0)
    std::vector<double> sigma;    // sigma_k(x0), k = 0..
    std::vector<double> w;        // w_k(x0)
    bool stagnated = false;
    std::string stop_reason;
    SandwichCheck sandwich;

    std::vector<double> gaps() const;
};

struct SequenceOptions {
    int k_max = 12;
    double stagnation = 1e-14;
    double tolerance = 1e-8;
};

/// Runs the lift and descent sequences at the probe from sigma_0 = the lower
/// barrier and w_0 = the upper barrier; with a solution, checks
/// sigma_K <= u <= w_K at every active node.
BarrierCertificate barrier_sequence(const Vec& probe, const BoundaryGraph& gamma, double h,
                                    const SequenceOptions& opt = {}, const Solution* u = nullptr);

/// Final barriers of the sequence, for inspection.
std::pair<PiecewiseBarrier, PiecewiseBarrier> barrier_pair(const Vec& probe, const BoundaryGraph& gamma, double h,
                                                           const SequenceOptions& opt = {});

/// Mean curvature of the Killing cylinder over the geodesic sphere, minimised
/// over `samples` boundary points, with respect to the inward normal.
double cylinder_mean_curvature(const ChartCase& chart, const GeodesicBallSpec& ball, int samples = 256);

/// Largest radius (up to r_max) for which the cylinder curvature exceeds
/// max(|H|, sqrt((n-1)/n)) by the relative margin.
double choose_ball_radius(const ChartCase& chart, const Vec& center, double h, double margin = 0.1,
                          double r_max = 2.0);

class BallConditionError : public std::domain_error {
public:
    BallConditionError(const std::string& what, double value) : std::domain_error(what), value_(value) {}
    double cylinder_curvature() const { return value_; }

private:
    double value_;
};

/// Replaces v inside the ball by the discrete CMC-H solution with data v on a
/// local masked grid (nodes per axis).
PiecewiseBarrier ball_lift(const PiecewiseBarrier& v, const GeodesicBallSpec& ball, double h,
                           const SolverConfig& cfg = {}, int nodes = 33);

}  // namespace hypcmc
