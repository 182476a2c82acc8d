#include "hypcmc/solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hypcmc {

std::vector<double> continuation_path(const SolverConfig& cfg, double h) {
    std::vector<double> path;
    if (!cfg.h_steps.empty()) {
        for (double v : cfg.h_steps) {
            if (v * h >= 0.0 && std::abs(v) < std::abs(h)) path.push_back(v);
        }
        if (path.empty() || path.front() != 0.0) path.insert(path.begin(), 0.0);
    } else {
        const double step = std::max(cfg.max_h_step, 1e-3);
        const int count = static_cast<int>(std::ceil(std::abs(h) / step - 1e-12));
        for (int k = 0; k < count; ++k) path.push_back(h * k / count);
    }
    if (path.empty() || path.back() != h) path.push_back(h);
    return path;
}

namespace {

Eigen::VectorXd interior_residual(const GraphFunction& u, double h) {
    const ResidualField r = residual(u, h);
    const auto& interior = u.grid->interior();
    Eigen::VectorXd v(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t i = 0; i < interior.size(); ++i) v[static_cast<Eigen::Index>(i)] = r.values[interior[i]];
    return v;
}

class Newton {
public:
    Newton(GraphFunction& u, const NewtonConfig& cfg, std::vector<NewtonRecord>& history, int& steps)
        : u_(u), cfg_(cfg), history_(history), steps_(steps) {}

    // Drives the residual max-norm at h below tol; returns a failure message or empty.
    // Lagged-coefficient steps run while the residual exceeds picard_switch or
    // after a failed line search; damped Newton steps finish the solve.
    std::string run(double h, double tol) {
        const auto& interior = u_.grid->interior();
        int newton_left = cfg_.max_iter;
        int picard_left = cfg_.max_picard;
        bool picard = false;
        bool first = true;
        for (int it = 0;; ++it) {
            Linearization lin =
                linearize(u_, h, picard ? LinearizationKind::FrozenCoefficients : LinearizationKind::Newton);
            const double rmax = lin.residual.lpNorm<Eigen::Infinity>();
            history_.push_back({h, it, rmax, it == 0 ? 0.0 : last_step_});
            if (!std::isfinite(rmax)) return "non-finite residual";
            if (rmax <= tol) return {};
            if (first && rmax > cfg_.picard_switch && picard_left > 0) {
                first = false;
                picard = true;
                history_.pop_back();
                --it;
                continue;
            }
            first = false;
            if (picard && (rmax <= cfg_.picard_switch || picard_left == 0)) {
                picard = false;
                history_.pop_back();
                --it;
                continue;
            }
            if (picard ? picard_left == 0 : newton_left == 0) break;
            (picard ? picard_left : newton_left) -= 1;

            SparseLU& lu = picard ? picard_lu_ : lu_;
            bool& analyzed = picard ? picard_analyzed_ : analyzed_;
            if (!analyzed) {
                lu.analyzePattern(lin.jacobian);
                analyzed = true;
            }
            lu.factorize(lin.jacobian);
            if (lu.info() != Eigen::Success) return "singular Jacobian";
            const Eigen::VectorXd delta = lu.solve(-lin.residual);
            if (lu.info() != Eigen::Success || !delta.allFinite()) return "linear solve failed";
            ++steps_;

            GraphFunction trial = u_;
            if (picard) {
                for (std::size_t i = 0; i < interior.size(); ++i) {
                    trial[interior[i]] += delta[static_cast<Eigen::Index>(i)];
                }
                last_step_ = 1.0;
                u_ = std::move(trial);
                continue;
            }
            const double merit0 = lin.residual.norm();
            double alpha = 1.0;
            bool accepted = false;
            while (alpha >= cfg_.min_step) {
                for (std::size_t i = 0; i < interior.size(); ++i) {
                    trial[interior[i]] = u_[interior[i]] + alpha * delta[static_cast<Eigen::Index>(i)];
                }
                const double merit = interior_residual(trial, h).norm();
                if (std::isfinite(merit) && merit < (1.0 - 1e-4 * alpha) * merit0) {
                    accepted = true;
                    break;
                }
                alpha *= cfg_.damping;
            }
            if (!accepted) {
                if (picard_left > 0 && rmax > cfg_.picard_switch) {
                    picard = true;
                    continue;
                }
                std::ostringstream os;
                os << "Newton stagnation at H = " << h << " (residual " << rmax << ", step below " << cfg_.min_step
                   << ")";
                return os.str();
            }
            last_step_ = alpha;
            u_ = std::move(trial);
        }
        std::ostringstream os;
        os << "Newton did not converge in " << cfg_.max_iter << " iterations at H = " << h;
        return os.str();
    }

private:
    GraphFunction& u_;
    const NewtonConfig& cfg_;
    std::vector<NewtonRecord>& history_;
    int& steps_;
    using SparseLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
    SparseLU lu_, picard_lu_;
    bool analyzed_ = false;
    bool picard_analyzed_ = false;
    double last_step_ = 1.0;
};

void finish(Solution& s) {
    const ResidualField r = residual(s.u, s.h);
    s.diagnostics.residual_max = r.max_norm;
    s.diagnostics.residual_l2 = r.l2_norm;
    double sup = 0.0;
    for (std::size_t node : s.u.grid->interior()) sup = std::max(sup, gradient_norm(s.u, node));
    s.diagnostics.gradient_sup = sup;
}

}  // namespace

Solution dirichlet_solve(const GridPtr& grid, double h, const GraphFunction& boundary, const SolverConfig& cfg,
                         const GraphFunction* seed) {
    check_curvature_range(h);
    if (!grid || !boundary.grid || !grid->same_layout(*boundary.grid)) {
        throw DomainError("dirichlet_solve: boundary data lives on a different grid");
    }
    if (seed && (!seed->grid || !grid->same_layout(*seed->grid))) {
        throw DomainError("dirichlet_solve: seed lives on a different grid");
    }
    if (!(cfg.newton.abs_tol > 0.0)) throw DomainError("dirichlet_solve: abs_tol must be positive");

    Solution s;
    s.h = h;
    s.u = GraphFunction(grid);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t node : grid->boundary()) {
        const double v = boundary[node];
        if (!std::isfinite(v)) throw DomainError("dirichlet_solve: non-finite boundary value");
        s.u[node] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    auto& history = s.diagnostics.history;
    int& steps = s.diagnostics.newton_steps;
    Newton newton(s.u, cfg.newton, history, steps);
    const auto path = continuation_path(cfg, h);

    auto continuation = [&]() {
        for (std::size_t k = 0; k < path.size(); ++k) {
            const bool last = k + 1 == path.size();
            const std::string err = newton.run(path[k], last ? cfg.newton.abs_tol : cfg.newton.stage_tol);
            if (!err.empty()) throw SolverError("dirichlet_solve: " + err, s.u, history);
        }
    };

    if (seed) {
        for (std::size_t node : grid->interior()) s.u[node] = (*seed)[node];
        if (newton.run(h, cfg.newton.abs_tol).empty()) {
            finish(s);
            return s;
        }
        s.diagnostics.warnings.push_back("seeded Newton at target H failed; continued from H = 0");
        for (std::size_t node : grid->interior()) s.u[node] = (*seed)[node];
        continuation();
        finish(s);
        return s;
    }

    const double mid = grid->boundary().empty() ? 0.0 : 0.5 * (lo + hi);
    for (std::size_t node : grid->interior()) s.u[node] = mid;
    if (lo != hi) {
        // one linear step of the H = 0 problem about the boundary mean
        const Linearization lin = linearize(s.u, 0.0);
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(lin.jacobian);
        if (lu.info() != Eigen::Success) throw SolverError("dirichlet_solve: singular seed Jacobian", s.u, history);
        const Eigen::VectorXd delta = lu.solve(-lin.residual);
        const auto& interior = grid->interior();
        for (std::size_t i = 0; i < interior.size(); ++i) {
            s.u[interior[i]] += std::clamp(delta[static_cast<Eigen::Index>(i)], lo - mid, hi - mid);
        }
        ++steps;
    }
    continuation();
    finish(s);
    return s;
}

GridPtr asymptotic_grid(const ChartCase& chart, const TruncationConfig& t) {
    if (!(t.epsilon > 0.0)) throw DomainError("truncation epsilon must be positive");
    if (!(t.spacing > 0.0) || !(t.extent > 0.0)) throw DomainError("truncation spacing and extent must be positive");
    const int n = chart.n;
    Vec lo(n), hi(n);
    std::vector<int> counts(n);
    if (chart.kind == ChartKind::Parabolic) {
        for (int a = 0; a + 1 < n; ++a) {
            lo[a] = -t.extent;
            hi[a] = t.extent;
            counts[a] = static_cast<int>(std::lround(2.0 * t.extent / t.spacing)) + 1;
        }
        lo[n - 1] = t.epsilon;
        hi[n - 1] = t.epsilon + t.extent;
        counts[n - 1] = static_cast<int>(std::lround(t.extent / t.spacing)) + 1;
        return std::make_shared<const ChartGrid>(ChartGrid::box(chart, lo, hi, counts));
    }
    if (!(t.epsilon < 1.0)) throw DomainError("hyperbolic truncation epsilon must be below 1");
    for (int a = 0; a < n; ++a) {
        lo[a] = -1.0;
        hi[a] = 1.0;
        counts[a] = static_cast<int>(std::lround(2.0 / t.spacing)) + 1;
    }
    const double cutoff = 1.0 - t.epsilon;
    return std::make_shared<const ChartGrid>(ChartGrid::masked(
        chart, lo, hi, counts, [cutoff](const Vec& xi) { return xi.norm() < cutoff; }, EdgeTag::Ideal));
}

SurfaceGraph lower_barrier(const ChartCase& chart, const BoundaryGraph& phi, double h) {
    return subsolution_barrier(chart, phi.inf(), h);
}

SurfaceGraph upper_barrier(const ChartCase& chart, const BoundaryGraph& phi, double h) {
    return supersolution_barrier(chart, phi.sup(), h);
}

namespace {

GraphFunction sample_where_defined(const SurfaceGraph& s, const GridPtr& grid, double fallback) {
    GraphFunction f(grid, fallback);
    for (std::size_t node = 0; node < grid->size(); ++node) {
        if (grid->kind(node) == NodeKind::Inactive) continue;
        if (const auto v = s.value(grid->coords(node))) f[node] = *v;
    }
    return f;
}

Solution solve_on(const AsymptoticProblem& p, const SolverConfig& cfg, SeedKind seed, const GridPtr& grid) {
    const ChartCase& chart = p.chart;
    const double shift = chart.kind == ChartKind::Parabolic ? p.phi.inf() : 0.0;
    const BoundaryGraph phi = shift != 0.0 ? p.phi.shifted(-shift) : p.phi;
    const SurfaceGraph lower = lower_barrier(chart, phi, p.h);
    const SurfaceGraph upper = upper_barrier(chart, phi, p.h);

    GraphFunction data(grid);
    for (std::size_t node : grid->boundary()) {
        const Vec xi = grid->coords(node);
        if (grid->tag(node) == EdgeTag::Ideal || cfg.policy == ArtificialPolicy::ConstantExtension) {
            data[node] = phi.at_chart_point(xi);
            continue;
        }
        const auto a = lower.value(xi);
        const auto b = upper.value(xi);
        if (!a || !b) throw DomainError("asymptotic_solve: barrier undefined on an artificial edge");
        // ramp from the ideal datum at the ideal edge to the barrier midpoint at the top
        const int last = chart.n - 1;
        const double s = (xi[last] - grid->lo()[last]) / (grid->hi()[last] - grid->lo()[last]);
        data[node] = (1.0 - s) * phi.at_chart_point(xi) + s * 0.5 * (*a + *b);
    }

    Solution s;
    if (seed == SeedKind::Harmonic) {
        s = dirichlet_solve(grid, p.h, data, cfg);
    } else {
        const GraphFunction start =
            sample_where_defined(seed == SeedKind::Sub ? lower : upper, grid, seed == SeedKind::Sub ? phi.inf() : phi.sup());
        s = dirichlet_solve(grid, p.h, data, cfg, &start);
    }

    if (shift != 0.0) {
        for (std::size_t node = 0; node < grid->size(); ++node) {
            if (grid->kind(node) != NodeKind::Inactive) s.u[node] += shift;
        }
    }
    const SandwichMargins m = sandwich_margins(p, s.u);
    s.diagnostics.sandwich_lower = m.lower;
    s.diagnostics.sandwich_upper = m.upper;
    s.diagnostics.shift = shift;
    return s;
}

}  // namespace

SandwichMargins sandwich_margins(const AsymptoticProblem& p, const GraphFunction& u) {
    const ChartGrid& g = *u.grid;
    const double shift = p.chart.kind == ChartKind::Parabolic ? p.phi.inf() : 0.0;
    const BoundaryGraph phi = shift != 0.0 ? p.phi.shifted(-shift) : p.phi;
    const SurfaceGraph lower = lower_barrier(p.chart, phi, p.h);
    const SurfaceGraph upper = upper_barrier(p.chart, phi, p.h);
    SandwichMargins m{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (std::size_t node = 0; node < g.size(); ++node) {
        if (g.kind(node) == NodeKind::Inactive) continue;
        const Vec xi = g.coords(node);
        if (const auto a = lower.value(xi)) m.lower = std::min(m.lower, u[node] - shift - *a);
        if (const auto b = upper.value(xi)) m.upper = std::min(m.upper, *b - (u[node] - shift));
    }
    return m;
}

Solution asymptotic_solve(const AsymptoticProblem& problem, const SolverConfig& cfg, SeedKind seed) {
    check_curvature_range(problem.h);
    if (!(problem.phi.chart() == problem.chart)) throw DomainError("asymptotic_solve: boundary data chart differs");
    const GridPtr grid = asymptotic_grid(problem.chart, cfg.truncation);
    Solution s = solve_on(problem, cfg, seed, grid);
    if (!cfg.sensitivity) return s;

    TruncationConfig wide = cfg.truncation;
    if (problem.chart.kind == ChartKind::Parabolic) {
        wide.extent *= 2.0;
    } else {
        wide.epsilon *= 0.5;
    }
    SolverConfig cfg2 = cfg;
    cfg2.sensitivity = false;
    cfg2.truncation = wide;
    const Solution big = solve_on(problem, cfg2, seed, asymptotic_grid(problem.chart, wide));
    double change = 0.0;
    for (std::size_t node : grid->interior()) {
        if (const auto v = interpolate(big.u, grid->coords(node))) change = std::max(change, std::abs(*v - s.u[node]));
    }
    s.diagnostics.sensitivity = change;
    if (change > cfg.sensitivity_warning) {
        std::ostringstream os;
        os << "truncation sensitivity " << change << " exceeds " << cfg.sensitivity_warning;
        s.diagnostics.warnings.push_back(os.str());
    }
    return s;
}

OrderingReport compare_solutions(const Solution& u1, const Solution& u2, double tol) {
    if (!u1.u.grid || !u2.u.grid || !u1.u.grid->same_layout(*u2.u.grid)) {
        throw DomainError("compare_solutions: solutions live on different grids");
    }
    const ChartGrid& g = *u1.u.grid;
    OrderingReport r;
    r.min_difference = std::numeric_limits<double>::infinity();
    for (std::size_t node = 0; node < g.size(); ++node) {
        if (g.kind(node) == NodeKind::Inactive) continue;
        const double d = u2.u[node] - u1.u[node];
        r.min_difference = std::min(r.min_difference, d);
        if (d < -tol) r.violations.push_back(node);
    }
    return r;
}

GradientProfile gradient_monitor(const Solution& u, double delta) {
    if (!(delta > 0.0)) throw DomainError("gradient_monitor: margin must be positive");
    const ChartGrid& g = *u.u.grid;
    std::vector<Vec> edge;
    edge.reserve(g.boundary().size());
    for (std::size_t node : g.boundary()) edge.push_back(g.coords(node));
    GradientProfile p;
    for (std::size_t node : g.interior()) {
        const Vec xi = g.coords(node);
        double dist = std::numeric_limits<double>::infinity();
        for (const Vec& b : edge) dist = std::min(dist, (b - xi).squaredNorm());
        dist = std::sqrt(dist);
        if (dist < delta) continue;
        const double s = gradient_norm(u.u, node);
        p.sup = std::max(p.sup, s);
        const auto shell = static_cast<std::size_t>(std::floor(dist / delta)) - 1;
        if (shell >= p.shell_sup.size()) {
            for (std::size_t k = p.shell_sup.size(); k <= shell; ++k) {
                p.shell_edges.push_back(static_cast<double>(k + 1) * delta);
                p.shell_sup.push_back(0.0);
            }
        }
        p.shell_sup[shell] = std::max(p.shell_sup[shell], s);
    }
    return p;
}

}  // namespace hypcmc
