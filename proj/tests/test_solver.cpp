#include "support.hpp"

#include <gtest/gtest.h>

using namespace hypcmc;
using namespace testing_support;

namespace {

GridPtr unit_box(double dx) { return box_grid(parabolic(), vec({-1, 0.25}), vec({1, 1.25}), dx); }

SolverConfig coarse() {
    SolverConfig cfg;
    cfg.truncation.spacing = 1.0 / 16;
    return cfg;
}

BoundaryGraph constant_phi(const ChartCase& chart, double a) {
    return make_boundary_graph(chart, {"constant", {{"a", a}}, ""});
}

BoundaryGraph bump_phi() { return make_boundary_graph(parabolic(), {"bump", {{"a", 1.0}, {"b", 0.5}}, ""}); }

double max_abs_diff(const GraphFunction& a, const GraphFunction& b) {
    double e = 0.0;
    for (std::size_t node = 0; node < a.grid->size(); ++node) {
        if (a.grid->kind(node) != NodeKind::Inactive) e = std::max(e, std::abs(a[node] - b[node]));
    }
    return e;
}

std::pair<double, double> active_range(const GraphFunction& u) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t node = 0; node < u.grid->size(); ++node) {
        if (u.grid->kind(node) == NodeKind::Inactive) continue;
        lo = std::min(lo, u[node]);
        hi = std::max(hi, u[node]);
    }
    return {lo, hi};
}

}  // namespace

TEST(ContinuationPath, DefaultStepsStartAtZeroAndEndAtTarget) {
    SolverConfig cfg;
    const auto p = continuation_path(cfg, 0.35);
    ASSERT_GE(p.size(), 2u);
    EXPECT_EQ(p.front(), 0.0);
    EXPECT_EQ(p.back(), 0.35);
    for (std::size_t k = 1; k < p.size(); ++k) EXPECT_LE(p[k] - p[k - 1], 0.1 + 1e-15);
    EXPECT_EQ(continuation_path(cfg, 0.0), std::vector<double>{0.0});
    const auto neg = continuation_path(cfg, -0.25);
    EXPECT_EQ(neg.back(), -0.25);
    for (std::size_t k = 1; k < neg.size(); ++k) EXPECT_LT(neg[k], neg[k - 1]);
}

TEST(ContinuationPath, ExplicitStepsAreClipped) {
    SolverConfig cfg;
    cfg.h_steps = {0.2, 0.4, 0.6};
    EXPECT_EQ(continuation_path(cfg, 0.5), (std::vector<double>{0.0, 0.2, 0.4, 0.5}));
}

TEST(Dirichlet, ConstantDataIsExact) {
    const GridPtr g = unit_box(1.0 / 16);
    const Solution s = dirichlet_solve(g, 0.0, GraphFunction(g, 0.7), SolverConfig{});
    EXPECT_LE(s.diagnostics.newton_steps, 1);
    EXPECT_EQ(max_abs_diff(s.u, GraphFunction(g, 0.7)), 0.0);
}

TEST(Dirichlet, RejectsCurvatureOutsideRange) {
    const GridPtr g = unit_box(1.0 / 8);
    EXPECT_THROW(dirichlet_solve(g, 1.0, GraphFunction(g, 0.7), SolverConfig{}), CurvatureRangeError);
    EXPECT_THROW(dirichlet_solve(g, -1.2, GraphFunction(g, 0.7), SolverConfig{}), CurvatureRangeError);
}

TEST(Dirichlet, ReportedResidualMatchesRecomputation) {
    const GridPtr g = unit_box(1.0 / 16);
    const SurfaceGraph s = surface_as_graph(ModelSurface::hemisphere(vec({0, 0}), 3.0), parabolic());
    const Solution sol = dirichlet_solve(g, 0.3, sample_graph(s, g), SolverConfig{});
    const ResidualField r = residual(sol.u, 0.3);
    EXPECT_NEAR(sol.diagnostics.residual_max, r.max_norm, 1e-12);
    EXPECT_NEAR(sol.diagnostics.residual_l2, r.l2_norm, 1e-12);
    EXPECT_LE(sol.diagnostics.residual_max, SolverConfig{}.newton.abs_tol);
}

TEST(Dirichlet, ExactSolutionsRecoveredAtSecondOrder) {
    struct Case {
        ModelSurface m;
        const char* name;
    };
    for (const Case& c : {Case{ModelSurface::tilted_plane(0.3, 0.75), "tilted"},
                          Case{ModelSurface::hemisphere(vec({0, 0}), 3.0), "hemisphere"},
                          Case{ModelSurface::spherical_cap(vec({0, 0}), 3.0, std::acos(0.4)), "cap"}}) {
        const SurfaceGraph s = surface_as_graph(c.m, parabolic());
        const double h = graph_mean_curvature(s);
        std::vector<double> err;
        for (double dx : {1.0 / 16, 1.0 / 32}) {
            const GridPtr g = unit_box(dx);
            const GraphFunction exact = sample_graph(s, g);
            err.push_back(max_abs_diff(dirichlet_solve(g, h, exact, SolverConfig{}).u, exact));
        }
        EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.3) << c.name;
    }
}

TEST(Dirichlet, SeedIndependence) {
    const GridPtr g = unit_box(1.0 / 16);
    const SurfaceGraph s = surface_as_graph(ModelSurface::tilted_plane(0.3, 0.75), parabolic());
    const GraphFunction data = sample_graph(s, g);
    const Solution a = dirichlet_solve(g, 0.6, data, SolverConfig{});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-0.05, 0.05);
    GraphFunction seed = data;
    for (std::size_t node : g->interior()) seed[node] += d(rng);
    const Solution b = dirichlet_solve(g, 0.6, data, SolverConfig{}, &seed);
    EXPECT_LT(max_abs_diff(a.u, b.u), 1e-6);
}

TEST(Dirichlet, NewtonTailIsQuadratic) {
    const GridPtr g = unit_box(1.0 / 32);
    for (const ModelSurface& m : {ModelSurface::tilted_plane(0.3, 0.75), ModelSurface::hemisphere(vec({0, 0}), 3.0)}) {
        const SurfaceGraph s = surface_as_graph(m, parabolic());
        const double h = graph_mean_curvature(s);
        const Solution sol = dirichlet_solve(g, h, sample_graph(s, g), SolverConfig{});
        const auto& hist = sol.diagnostics.history;
        ASSERT_GE(hist.size(), 2u);
        const double r0 = hist[hist.size() - 2].residual_max, r1 = hist.back().residual_max;
        EXPECT_EQ(hist.back().h, h);
        EXPECT_LE(r1, 1e3 * r0 * r0);
    }
}

TEST(Dirichlet, GridMismatchRejected) {
    const GridPtr a = unit_box(1.0 / 8), b = unit_box(1.0 / 16);
    EXPECT_THROW(dirichlet_solve(a, 0.0, GraphFunction(b, 1.0), SolverConfig{}), DomainError);
}

TEST(Asymptotic, FlatDataGivesVerticalPlane) {
    for (const ChartCase& chart : {parabolic(), hyperbolic()}) {
        const AsymptoticProblem p{chart, constant_phi(chart, 1.0), 0.0};
        const Solution s = asymptotic_solve(p, coarse());
        const auto [lo, hi] = active_range(s.u);
        EXPECT_NEAR(lo, 1.0, 1e-12);
        EXPECT_NEAR(hi, 1.0, 1e-12);
        EXPECT_GE(s.diagnostics.sandwich_lower, -1e-8);
        EXPECT_GE(s.diagnostics.sandwich_upper, -1e-8);
    }
}

TEST(Asymptotic, FlatDataAtPositiveCurvatureApproachesTiltedPlane) {
    // the truncated ideal edge pins u = 1 at t = eps, so the reference is the
    // x1-translate of the tilted plane through that line
    std::vector<double> dev;
    for (double extent : {1.0, 2.0, 4.0}) {
        SolverConfig cfg = coarse();
        cfg.truncation.extent = extent;
        const AsymptoticProblem p{parabolic(), constant_phi(parabolic(), 1.0), 0.6};
        const Solution s = asymptotic_solve(p, cfg);
        EXPECT_LE(s.diagnostics.residual_max, cfg.newton.abs_tol);
        EXPECT_GE(s.diagnostics.sandwich_lower, -1e-8);
        EXPECT_GE(s.diagnostics.sandwich_upper, -1e-8);
        const ChartGrid& g = *s.u.grid;
        double e = 0.0;
        for (std::size_t node = 0; node < g.size(); ++node) {
            const Vec x = g.coords(node);
            if (std::abs(x[0]) > 0.5 || x[1] > 0.5) continue;
            e = std::max(e, std::abs(s.u[node] - (1.0 + 0.75 * (x[1] - cfg.truncation.epsilon))));
        }
        dev.push_back(e);
    }
    EXPECT_LT(dev[1], dev[0]);
    EXPECT_LT(dev[2], dev[1]);
    EXPECT_LT(dev[2], 0.01);
}

TEST(Asymptotic, BumpLiesBetweenConstantSolutions) {
    const AsymptoticProblem p{parabolic(), bump_phi(), 0.0};
    const Solution s = asymptotic_solve(p, coarse());
    const Solution low = asymptotic_solve({parabolic(), constant_phi(parabolic(), 1.0), 0.0}, coarse());
    const Solution high = asymptotic_solve({parabolic(), constant_phi(parabolic(), 1.5), 0.0}, coarse());
    EXPECT_GE(compare_solutions(low, s).min_difference, -1e-8);
    EXPECT_GE(compare_solutions(s, high).min_difference, -1e-8);
    const auto [lo, hi] = active_range(s.u);
    EXPECT_GE(lo, 1.0 - 1e-8);
    EXPECT_LE(hi, 1.5 + 1e-8);
}

TEST(Asymptotic, ShiftIsUndoneOnOutput) {
    const BoundaryGraph phi = bump_phi();
    const Solution a = asymptotic_solve({parabolic(), phi, 0.3}, coarse());
    const Solution b = asymptotic_solve({parabolic(), phi.shifted(2.0), 0.3}, coarse());
    EXPECT_EQ(a.diagnostics.shift, 1.0);
    GraphFunction moved = a.u;
    for (double& x : moved.u) x += 2.0;
    EXPECT_LT(max_abs_diff(moved, b.u), 1e-9);
}

TEST(Asymptotic, SandwichHoldsAcrossCurvatures) {
    for (double h : {-0.3, 0.0, 0.3, 0.6}) {
        const AsymptoticProblem p{parabolic(), bump_phi(), h};
        const Solution s = asymptotic_solve(p, coarse());
        EXPECT_GE(s.diagnostics.sandwich_lower, -1e-8) << h;
        EXPECT_GE(s.diagnostics.sandwich_upper, -1e-8) << h;
        const SandwichMargins m = sandwich_margins(p, s.u);
        EXPECT_EQ(m.lower, s.diagnostics.sandwich_lower);
        EXPECT_EQ(m.upper, s.diagnostics.sandwich_upper);
    }
}

TEST(Asymptotic, SeedIndependence) {
    const std::vector<AsymptoticProblem> problems = {
        {parabolic(), bump_phi(), 0.0},
        {parabolic(), bump_phi(), 0.6},
        {hyperbolic(), make_boundary_graph(hyperbolic(), {"angular_sine", {{"a", 0.0}, {"b", 0.1}}, ""}), 0.3},
    };
    for (const auto& p : problems) {
        const Solution sub = asymptotic_solve(p, coarse(), SeedKind::Sub);
        const Solution super = asymptotic_solve(p, coarse(), SeedKind::Super);
        const Solution harmonic = asymptotic_solve(p, coarse());
        EXPECT_LT(max_abs_diff(sub.u, super.u), 1e-6);
        EXPECT_LT(max_abs_diff(sub.u, harmonic.u), 1e-6);
    }
}

TEST(Asymptotic, SensitivityIsReportedNotFatal) {
    SolverConfig cfg = coarse();
    cfg.truncation.extent = 1.0;
    cfg.sensitivity = true;
    cfg.sensitivity_warning = 1e-6;
    const Solution s = asymptotic_solve({parabolic(), bump_phi(), 0.3}, cfg);
    ASSERT_TRUE(s.diagnostics.sensitivity.has_value());
    EXPECT_GT(*s.diagnostics.sensitivity, 1e-6);
    EXPECT_FALSE(s.diagnostics.warnings.empty());
    EXPECT_FALSE(asymptotic_solve({parabolic(), bump_phi(), 0.3}, coarse()).diagnostics.sensitivity.has_value());
}

TEST(Asymptotic, PoliciesAgreeOnConstantData) {
    SolverConfig cfg = coarse();
    cfg.policy = ArtificialPolicy::ConstantExtension;
    const Solution s = asymptotic_solve({parabolic(), constant_phi(parabolic(), 0.4), 0.0}, cfg);
    const auto [lo, hi] = active_range(s.u);
    EXPECT_NEAR(lo, 0.4, 1e-12);
    EXPECT_NEAR(hi, 0.4, 1e-12);
}

TEST(Asymptotic, RejectsCurvatureOutsideRange) {
    EXPECT_THROW(asymptotic_solve({parabolic(), bump_phi(), 1.0}, coarse()), CurvatureRangeError);
}

TEST(Comparison, OrderedDataGiveOrderedSolutions) {
    for (double h : {0.0, 0.3}) {
        const BoundaryGraph phi = bump_phi();
        const Solution a = asymptotic_solve({parabolic(), phi, h}, coarse());
        const Solution b = asymptotic_solve({parabolic(), phi.shifted(0.5), h}, coarse());
        const OrderingReport r = compare_solutions(a, b);
        EXPECT_GE(r.min_difference, -1e-8);
        EXPECT_TRUE(r.violations.empty());
        EXPECT_EQ(compare_solutions(a, a).min_difference, 0.0);
    }
}

TEST(Comparison, LargerCurvatureLiesOnTheFarSide) {
    const BoundaryGraph phi = constant_phi(parabolic(), 1.0);
    const Solution a = asymptotic_solve({parabolic(), phi, 0.0}, coarse());
    const Solution b = asymptotic_solve({parabolic(), phi, 0.3}, coarse());
    EXPECT_GE(compare_solutions(a, b).min_difference, -1e-8);
    // reversed order is reported with its violations
    const OrderingReport r = compare_solutions(b, a);
    EXPECT_LT(r.min_difference, -1e-8);
    EXPECT_FALSE(r.violations.empty());
}

TEST(Comparison, GridMismatchRejected) {
    SolverConfig fine = coarse();
    fine.truncation.spacing = 1.0 / 8;
    const Solution a = asymptotic_solve({parabolic(), bump_phi(), 0.0}, coarse());
    const Solution b = asymptotic_solve({parabolic(), bump_phi(), 0.0}, fine);
    EXPECT_THROW(compare_solutions(a, b), DomainError);
}

TEST(GradientMonitor, ConstantHasZeroGradient) {
    const Solution s = asymptotic_solve({parabolic(), constant_phi(parabolic(), 1.0), 0.0}, coarse());
    const GradientProfile p = gradient_monitor(s, 0.25);
    EXPECT_EQ(p.sup, 0.0);
    EXPECT_FALSE(p.shell_sup.empty());
}

TEST(GradientMonitor, TiltedPlaneClosedForm) {
    // |grad u|_g = t |du| in the parabolic chart, so m t for u = c + m t
    const double m = 0.75;
    const SurfaceGraph s = surface_as_graph(ModelSurface::tilted_plane(0.3, m), parabolic());
    std::vector<double> sups, errs;
    for (double dx : {1.0 / 16, 1.0 / 32}) {
        const GridPtr g = unit_box(dx);
        const Solution sol = dirichlet_solve(g, graph_mean_curvature(s), sample_graph(s, g), SolverConfig{});
        const double delta = 0.125;
        const GradientProfile p = gradient_monitor(sol, delta);
        Solution exact = sol;
        exact.u = sample_graph(s, g);
        EXPECT_NEAR(gradient_monitor(exact, delta).sup, m * (1.25 - delta), 1e-12);
        sups.push_back(p.sup);
        errs.push_back(std::abs(p.sup - m * (1.25 - delta)));
        for (std::size_t k = 1; k < p.shell_edges.size(); ++k) EXPECT_GT(p.shell_edges[k], p.shell_edges[k - 1]);
    }
    EXPECT_LT(errs[1], errs[0]);
    EXPECT_LT(std::abs(sups[1] - sups[0]), 0.1 * sups[1]);
}

TEST(GradientMonitor, BumpStabilizesUnderRefinement) {
    std::vector<double> sups;
    for (double dx : {1.0 / 16, 1.0 / 32}) {
        SolverConfig cfg;
        cfg.truncation.spacing = dx;
        const Solution s = asymptotic_solve({parabolic(), bump_phi(), 0.0}, cfg);
        sups.push_back(gradient_monitor(s, 0.25).sup);
    }
    EXPECT_GT(sups[1], 0.0);
    EXPECT_LT(std::abs(sups[1] - sups[0]), 0.1 * sups[1]);
}

TEST(GradientMonitor, RejectsNonPositiveMargin) {
    const Solution s = asymptotic_solve({parabolic(), constant_phi(parabolic(), 1.0), 0.0}, coarse());
    EXPECT_THROW(gradient_monitor(s, 0.0), DomainError);
}
