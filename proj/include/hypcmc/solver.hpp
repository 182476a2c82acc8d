#pragma once

// Nonlinear solves of the discrete CMC Killing-graph equation: the Dirichlet
// problem on a chart grid and the truncated asymptotic Plateau problem.

#include "hypcmc/boundary_data.hpp"
#include "hypcmc/pde.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypcmc {

enum class ArtificialPolicy { BarrierBlend, ConstantExtension };

struct NewtonConfig {
    int max_iter = 60;
    double abs_tol = 1e-10;     // residual max-norm at the target H
    double stage_tol = 1e-4;   // residual max-norm at intermediate continuation stages
    double damping = 0.5;       // backtracking factor
    double min_step = 1e-6;
    double picard_switch = 5.0;  // lagged-coefficient steps above this residual
    int max_picard = 400;
};

struct TruncationConfig {
    double epsilon = 1.0 / 16.0;
    double extent = 2.0;        // parabolic: |y| <= extent, t <= epsilon + extent
    double spacing = 1.0 / 32.0;
    std::vector<double> refinement;  // spacings for refinement studies
};

struct SolverConfig {
    NewtonConfig newton;
    std::vector<double> h_steps;  // continuation values; empty means steps of max_h_step from 0
    double max_h_step = 0.1;
    TruncationConfig truncation;
    ArtificialPolicy policy = ArtificialPolicy::BarrierBlend;
    bool sensitivity = false;
    double sensitivity_warning = 1e-2;
};

/// Continuation values ending at h: cfg.h_steps clipped to h, or 0, 0.1, ..., h.
std::vector<double> continuation_path(const SolverConfig& cfg, double h);

struct NewtonRecord {
    double h = 0.0;
    int iteration = 0;
    double residual_max = 0.0;
    double step = 1.0;
};

struct Diagnostics {
    double residual_max = 0.0;
    double residual_l2 = 0.0;
    std::vector<NewtonRecord> history;
    int newton_steps = 0;
    double gradient_sup = 0.0;
    double sandwich_lower = 0.0;  // min(u - sub barrier)
    double sandwich_upper = 0.0;  // min(super barrier - u)
    std::optional<double> sensitivity;
    double shift = 0.0;
    std::vector<std::string> warnings;
};

struct Solution {
    GraphFunction u;
    double h = 0.0;
    Diagnostics diagnostics;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, GraphFunction last, std::vector<NewtonRecord> history)
        : std::runtime_error(what), last_(std::move(last)), history_(std::move(history)) {}
    const GraphFunction& last_iterate() const { return last_; }
    const std::vector<NewtonRecord>& history() const { return history_; }

private:
    GraphFunction last_;
    std::vector<NewtonRecord> history_;
};

/// Dirichlet problem on `grid` with data taken from `boundary` at boundary
/// nodes.  Without a seed, Newton starts from the H = 0 linearization about
/// the boundary mean and follows the continuation path; a seed supplies the
/// interior start and is tried directly at the target H first.
Solution dirichlet_solve(const GridPtr& grid, double h, const GraphFunction& boundary, const SolverConfig& cfg,
                         const GraphFunction* seed = nullptr);

struct AsymptoticProblem {
    ChartCase chart;
    BoundaryGraph phi;
    double h = 0.0;
};

enum class SeedKind { Harmonic, Sub, Super };

/// Truncated chart grid: parabolic box y in [-extent, extent]^{n-1},
/// t in [eps, eps + extent]; hyperbolic disk |xi| < 1 - eps.
GridPtr asymptotic_grid(const ChartCase& chart, const TruncationConfig& t);

/// Barrier graphs used for artificial data and the sandwich, for data phi
/// already shifted so that inf phi = 0 in the parabolic chart.
SurfaceGraph lower_barrier(const ChartCase& chart, const BoundaryGraph& phi, double h);
SurfaceGraph upper_barrier(const ChartCase& chart, const BoundaryGraph& phi, double h);

struct SandwichMargins {
    double lower = 0.0;  // min(u - sub barrier)
    double upper = 0.0;  // min(super barrier - u)
};

/// Margins of u (in unshifted coordinates) against the global barriers.
SandwichMargins sandwich_margins(const AsymptoticProblem& problem, const GraphFunction& u);

Solution asymptotic_solve(const AsymptoticProblem& problem, const SolverConfig& cfg, SeedKind seed = SeedKind::Harmonic);

struct OrderingReport {
    double min_difference = 0.0;             // min(u2 - u1) over active nodes
    std::vector<std::size_t> violations;     // nodes with u2 - u1 < -tol
};

OrderingReport compare_solutions(const Solution& u1, const Solution& u2, double tol = 1e-8);

struct GradientProfile {
    double sup = 0.0;
    std::vector<double> shell_edges;  // lower edge of each shell
    std::vector<double> shell_sup;
};

/// Sup of |grad u|_g over interior nodes at chart distance >= delta from the
/// truncated boundary, and its profile over shells of width delta.
GradientProfile gradient_monitor(const Solution& u, double delta);

}  // namespace hypcmc
