#include "hypcmc/perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace hypcmc {

PiecewiseBarrier::PiecewiseBarrier(BarrierKind kind, const SurfaceGraph& base)
    : kind_(kind), chart_(base.chart()), base_([base](const Vec& xi) { return base.value(xi); }), name_("model") {}

PiecewiseBarrier::PiecewiseBarrier(BarrierKind kind, ChartCase chart, Base base, std::string name)
    : kind_(kind), chart_(chart), base_(std::move(base)), name_(std::move(name)) {}

std::optional<double> PiecewiseBarrier::value(const Vec& xi) const {
    std::optional<double> v = base_(xi);
    if (!v) return std::nullopt;
    for (const Patch& p : patches_) {
        if (const auto* sheet = std::get_if<SurfaceGraph>(&p)) {
            if (const auto s = sheet->value(xi)) v = kind_ == BarrierKind::Sub ? std::max(*v, *s) : std::min(*v, *s);
            continue;
        }
        const auto& ball = std::get<BallPatch>(p);
        if (!chart_.contains(xi)) continue;
        if (chart_distance(chart_, ball.ball.center, xi) >= ball.ball.radius) continue;
        if (const auto s = interpolate(ball.local, xi)) v = *s;
    }
    return v;
}

double PiecewiseBarrier::operator()(const Vec& xi) const {
    const auto v = value(xi);
    if (!v) {
        std::ostringstream os;
        os << "barrier '" << name_ << "' is undefined at (" << xi.transpose() << ")";
        throw DomainError(os.str());
    }
    return *v;
}

PiecewiseBarrier PiecewiseBarrier::with_sheet(const SurfaceGraph& sheet) const {
    PiecewiseBarrier b = *this;
    b.patches_.emplace_back(sheet);
    return b;
}

PiecewiseBarrier PiecewiseBarrier::with_ball(BallPatch patch) const {
    PiecewiseBarrier b = *this;
    b.patches_.emplace_back(std::move(patch));
    return b;
}

Vec ideal_point(const ChartCase& chart, const Vec& probe, double v) {
    const int n = chart.n;
    if (probe.size() != n) throw DomainError("ideal_point: probe dimension differs from chart");
    if (chart.kind == ChartKind::Parabolic) {
        if (std::abs(probe[n - 1]) > 1e-12) throw DomainError("ideal_point: parabolic probe must have t = 0");
        Vec p(n);
        p[0] = v;
        p.tail(n - 1) = probe.head(n - 1);
        return p;
    }
    if (std::abs(probe.norm() - 1.0) > 1e-12) throw DomainError("ideal_point: hyperbolic probe must be a unit vector");
    return std::exp(v) * probe;
}

namespace {

LiftStep patch_step(const PiecewiseBarrier& b, const Vec& probe, const BoundaryGraph& gamma, double h, bool sub) {
    const ChartCase& chart = b.chart();
    if (!(gamma.chart() == chart)) throw DomainError("barrier and boundary data use different charts");
    const Vec centre = ideal_point(chart, probe, b(probe));
    IdealSphere e;
    try {
        e = clear_sphere_radius(gamma, centre, sub ? SphereSide::ContainsM : SphereSide::OppositeM);
    } catch (const BoundaryError&) {
        // the barrier already meets Gamma over the probe
        return {b, true, IdealSphere{centre, 0.0}};
    }
    if (!(e.radius > 0.0)) return {b, true, IdealSphere{centre, 0.0}};
    const ModelSurface s = sub ? cmc_cap_for_boundary_sphere(e, std::min(h, 0.0), CapSide::Inside)
                               : cmc_cap_for_boundary_sphere(e, std::max(h, 0.0), CapSide::Outside);
    return {b.with_sheet(SurfaceGraph(s, chart, sub ? Sheet::Far : Sheet::Near)), false, e};
}

}  // namespace

LiftStep sub_lift(const PiecewiseBarrier& sigma, const Vec& probe, const BoundaryGraph& gamma, double h) {
    if (sigma.kind() != BarrierKind::Sub) throw DomainError("sub_lift: barrier is not a subsolution");
    check_curvature_range(h);
    return patch_step(sigma, probe, gamma, h, true);
}

LiftStep super_descent(const PiecewiseBarrier& w, const Vec& probe, const BoundaryGraph& gamma, double h) {
    if (w.kind() != BarrierKind::Super) throw DomainError("super_descent: barrier is not a supersolution");
    check_curvature_range(h);
    return patch_step(w, probe, gamma, h, false);
}

std::vector<double> BarrierCertificate::gaps() const {
    std::vector<double> g;
    for (std::size_t k = 0; k < std::min(sigma.size(), w.size()); ++k) g.push_back(w[k] - sigma[k]);
    return g;
}

namespace {

struct SequenceRun {
    BarrierCertificate cert;
    PiecewiseBarrier sigma;
    PiecewiseBarrier w;
};

SequenceRun run_sequence(const Vec& probe, const BoundaryGraph& gamma, double h, const SequenceOptions& opt) {
    check_curvature_range(h);
    const ChartCase& chart = gamma.chart();
    if (chart.kind == ChartKind::Parabolic && !probe.allFinite()) {
        throw DomainError("barrier_sequence: probe must differ from the fixed point at infinity");
    }
    SequenceRun r{BarrierCertificate{}, PiecewiseBarrier(BarrierKind::Sub, lower_barrier(chart, gamma, h)),
                  PiecewiseBarrier(BarrierKind::Super, upper_barrier(chart, gamma, h))};
    r.cert.probe = probe;
    r.cert.target = gamma.at_chart_point(probe);
    r.cert.sigma.push_back(r.sigma(probe));
    r.cert.w.push_back(r.w(probe));
    bool sub_done = false;
    bool super_done = false;
    r.cert.stop_reason = "k_max reached";
    for (int k = 0; k < opt.k_max; ++k) {
        const double gap = r.cert.w.back() - r.cert.sigma.back();
        if (!sub_done) {
            LiftStep s = sub_lift(r.sigma, probe, gamma, h);
            sub_done = s.terminal;
            r.sigma = std::move(s.barrier);
        }
        if (!super_done) {
            LiftStep s = super_descent(r.w, probe, gamma, h);
            super_done = s.terminal;
            r.w = std::move(s.barrier);
        }
        if (sub_done && super_done) {
            r.cert.stop_reason = "Gamma reached";
            break;
        }
        const double sk = r.sigma(probe);
        const double wk = r.w(probe);
        r.cert.sigma.push_back(sk);
        r.cert.w.push_back(wk);
        if (gap - (wk - sk) < opt.stagnation) {
            r.cert.stagnated = true;
            r.cert.stop_reason = "stagnation";
            break;
        }
    }
    return r;
}

}  // namespace

BarrierCertificate barrier_sequence(const Vec& probe, const BoundaryGraph& gamma, double h, const SequenceOptions& opt,
                                    const Solution* u) {
    SequenceRun r = run_sequence(probe, gamma, h, opt);
    if (!u) return r.cert;
    const ChartGrid& g = *u->u.grid;
    if (!(g.chart() == gamma.chart())) throw DomainError("barrier_sequence: solution chart differs");
    SandwichCheck& c = r.cert.sandwich;
    c.checked = true;
    c.lower_margin = std::numeric_limits<double>::infinity();
    c.upper_margin = c.lower_margin;
    for (std::size_t node = 0; node < g.size(); ++node) {
        if (g.kind(node) == NodeKind::Inactive) continue;
        const Vec xi = g.coords(node);
        const auto s = r.sigma.value(xi);
        const auto w = r.w.value(xi);
        if (!s || !w) continue;
        ++c.nodes;
        const double lo = u->u[node] - *s;
        const double hi = *w - u->u[node];
        c.lower_margin = std::min(c.lower_margin, lo);
        c.upper_margin = std::min(c.upper_margin, hi);
        if (lo < -opt.tolerance || hi < -opt.tolerance) ++c.violations;
    }
    return r.cert;
}

std::pair<PiecewiseBarrier, PiecewiseBarrier> barrier_pair(const Vec& probe, const BoundaryGraph& gamma, double h,
                                                           const SequenceOptions& opt) {
    SequenceRun r = run_sequence(probe, gamma, h, opt);
    return {std::move(r.sigma), std::move(r.w)};
}

namespace {

std::vector<Vec> sample_directions(int n, int samples) {
    std::vector<Vec> dirs;
    if (n == 2) {
        for (int j = 0; j < samples; ++j) {
            const double a = 2.0 * std::numbers::pi * j / samples;
            Vec v(2);
            v << std::cos(a), std::sin(a);
            dirs.push_back(v);
        }
        return dirs;
    }
    for (int a = 0; a < n; ++a) {
        for (double s : {-1.0, 1.0}) {
            Vec v = Vec::Zero(n);
            v[a] = s;
            dirs.push_back(v);
        }
    }
    std::mt19937 rng(7);
    std::normal_distribution<double> normal;
    while (static_cast<int>(dirs.size()) < samples) {
        Vec v(n);
        for (int a = 0; a < n; ++a) v[a] = normal(rng);
        dirs.push_back(v.normalized());
    }
    return dirs;
}

// Chart point at intrinsic distance r from the center along the chart ray v.
Vec sphere_point(const ChartCase& chart, const Vec& center, const Vec& v, double r) {
    double s_max = std::numeric_limits<double>::infinity();
    if (chart.kind == ChartKind::Parabolic) {
        const double vt = v[chart.n - 1];
        if (vt < 0.0) s_max = center[chart.n - 1] / -vt;
    } else {
        const double b = center.dot(v);
        s_max = -b + std::sqrt(b * b + 1.0 - center.squaredNorm());
    }
    double lo = 0.0;
    double hi = std::isfinite(s_max) ? s_max * (1.0 - 1e-12) : 1.0;
    if (!std::isfinite(s_max)) {
        while (chart_distance(chart, center, center + hi * v) < r) hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (chart_distance(chart, center, center + mid * v) < r ? lo : hi) = mid;
    }
    return center + 0.5 * (lo + hi) * v;
}

double required_curvature(int n, double h) {
    return std::max(std::abs(h), std::sqrt((n - 1.0) / n));
}

}  // namespace

double cylinder_mean_curvature(const ChartCase& chart, const GeodesicBallSpec& ball, int samples) {
    if (!chart.contains(ball.center)) throw DomainError("geodesic ball center outside the chart");
    if (!(ball.radius > 0.0)) throw DomainError("geodesic ball radius must be positive");
    const int n = chart.n;
    const double sphere = (n - 1) / std::tanh(ball.radius);
    double worst = std::numeric_limits<double>::infinity();
    for (const Vec& v : sample_directions(n, samples)) {
        const Vec x = sphere_point(chart, ball.center, v, ball.radius);
        Vec dd;
        chart_distance(chart, ball.center, x, &dd);
        const ChartMetricData m = chart_metric(chart, x);
        const GammaValue gv = gamma_field(chart, x);
        const Vec grad_d = m.g_inv * dd;
        const Vec inward = -grad_d / std::sqrt(dd.dot(grad_d));
        // curvature of the flow orbits, grad(gamma) / (2 gamma), against the inward normal
        const double orbit = gv.dgamma.dot(inward) / (2.0 * gv.gamma);
        worst = std::min(worst, (sphere + orbit) / n);
    }
    return worst;
}

double choose_ball_radius(const ChartCase& chart, const Vec& center, double h, double margin, double r_max) {
    const double need = (1.0 + margin) * required_curvature(chart.n, h);
    auto ok = [&](double r) { return cylinder_mean_curvature(chart, {center, r}, 64) >= need; };
    if (ok(r_max)) return r_max;
    double lo = 0.0;
    double hi = r_max;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid > 0.0 && ok(mid) ? lo : hi) = mid;
    }
    if (!(lo > 0.0)) throw DomainError("choose_ball_radius: no admissible radius");
    return lo;
}

PiecewiseBarrier ball_lift(const PiecewiseBarrier& v, const GeodesicBallSpec& ball, double h, const SolverConfig& cfg,
                           int nodes) {
    check_curvature_range(h);
    const ChartCase& chart = v.chart();
    const int n = chart.n;
    const double hg = cylinder_mean_curvature(chart, ball);
    const double need = required_curvature(n, h);
    if (hg < need) {
        std::ostringstream os;
        os << "ball_lift: cylinder mean curvature " << hg << " is below " << need;
        throw BallConditionError(os.str(), hg);
    }

    Vec lo = ball.center, hi = ball.center;
    for (const Vec& dir : sample_directions(n, 128)) {
        const Vec x = sphere_point(chart, ball.center, dir, ball.radius);
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    const Vec pad = 0.15 * (hi - lo);
    const double t_min = lo[n - 1];
    lo -= pad;
    hi += pad;
    if (chart.kind == ChartKind::Parabolic) lo[n - 1] = std::max(lo[n - 1], 0.5 * t_min);
    const GridPtr grid = std::make_shared<const ChartGrid>(ChartGrid::masked(
        chart, lo, hi, std::vector<int>(n, nodes),
        [&](const Vec& xi) { return chart.contains(xi) && chart_distance(chart, ball.center, xi) < ball.radius; },
        EdgeTag::Artificial));

    GraphFunction data(grid);
    for (std::size_t node = 0; node < grid->size(); ++node) {
        if (grid->kind(node) != NodeKind::Inactive) data[node] = v(grid->coords(node));
    }
    const Solution s = dirichlet_solve(grid, h, data, cfg, &data);
    return v.with_ball(BallPatch{ball, s.u});
}

}  // namespace hypcmc
