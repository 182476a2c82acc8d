#include "hypcmc/model_surfaces.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace hypcmc {

ModelSurface ModelSurface::vertical_plane(double c) {
    ModelSurface s;
    s.kind = SurfaceKind::VerticalPlane;
    s.offset = c;
    return s;
}

ModelSurface ModelSurface::tilted_plane(double c, double m) {
    ModelSurface s;
    s.kind = m == 0.0 ? SurfaceKind::VerticalPlane : SurfaceKind::TiltedPlane;
    s.offset = c;
    s.slope = m;
    return s;
}

ModelSurface ModelSurface::hemisphere(Vec center, double radius) {
    if (!(radius > 0.0)) throw DomainError("hemisphere: radius must be positive");
    ModelSurface s;
    s.kind = SurfaceKind::Hemisphere;
    s.center = std::move(center);
    s.radius = radius;
    s.angle = std::numbers::pi / 2;
    return s;
}

ModelSurface ModelSurface::spherical_cap(Vec center, double radius, double theta) {
    if (!(radius > 0.0)) throw DomainError("spherical cap: radius must be positive");
    if (!(theta > 0.0 && theta < std::numbers::pi)) {
        throw DomainError("spherical cap: contact angle must lie in (0, pi)");
    }
    ModelSurface s = hemisphere(std::move(center), radius);
    s.kind = SurfaceKind::SphericalCap;
    s.angle = theta;
    return s;
}

ModelSurface ModelSurface::horosphere(double height) {
    if (!(height > 0.0)) throw DomainError("horosphere: height must be positive");
    ModelSurface s;
    s.kind = SurfaceKind::Horosphere;
    s.offset = height;
    return s;
}

ModelSurface ModelSurface::sphere(Vec center, double radius) {
    if (!(radius > 0.0)) throw DomainError("sphere: radius must be positive");
    ModelSurface s;
    s.kind = SurfaceKind::Sphere;
    s.center = std::move(center);
    s.radius = radius;
    return s;
}

ModelSurface ModelSurface::reversed() const {
    ModelSurface s = *this;
    s.normal = normal == NormalSide::Reference ? NormalSide::Reversed : NormalSide::Reference;
    return s;
}

std::optional<EuclideanSphere> ModelSurface::euclidean_sphere() const {
    switch (kind) {
        case SurfaceKind::Hemisphere:
        case SurfaceKind::SphericalCap: {
            const int n = static_cast<int>(center.size());
            EuclideanSphere e;
            e.center = Vec::Zero(n + 1);
            e.center.head(n) = center;
            e.center[n] = radius * std::cos(angle) / std::sin(angle);
            e.radius = radius / std::sin(angle);
            if (kind == SurfaceKind::Hemisphere) {
                e.center[n] = 0.0;
                e.radius = radius;
            }
            return e;
        }
        case SurfaceKind::Sphere:
            return EuclideanSphere{center, radius};
        default:
            return std::nullopt;
    }
}

double exact_mean_curvature(const ModelSurface& s) {
    double h = 0.0;
    switch (s.kind) {
        case SurfaceKind::VerticalPlane:
        case SurfaceKind::Hemisphere:
            h = 0.0;
            break;
        case SurfaceKind::TiltedPlane:
            h = s.slope / std::sqrt(1.0 + s.slope * s.slope);
            break;
        case SurfaceKind::SphericalCap:
            h = std::cos(s.angle);
            break;
        case SurfaceKind::Horosphere:
            h = 1.0;
            break;
        case SurfaceKind::Sphere: {
            const double z0 = s.center[s.center.size() - 1];
            h = z0 / s.radius;
            break;
        }
    }
    return s.normal == NormalSide::Reference ? h : -h;
}

SurfaceGraph::SurfaceGraph(ModelSurface surface, ChartCase chart, Sheet sheet)
    : surface_(std::move(surface)), chart_(chart), sheet_(sheet) {
    if (auto e = surface_.euclidean_sphere(); e && e->center.size() != chart_.n + 1) {
        throw DomainError("surface_as_graph: surface and chart dimensions differ");
    }
}

bool SurfaceGraph::graphable() const {
    return !(chart_.kind == ChartKind::Parabolic && surface_.kind == SurfaceKind::Horosphere);
}

std::optional<double> SurfaceGraph::value(const Vec& xi) const {
    const int n = chart_.n;
    if (xi.size() != n || !xi.allFinite()) return std::nullopt;
    const auto sphere = surface_.euclidean_sphere();

    if (chart_.kind == ChartKind::Parabolic) {
        const double t = xi[n - 1];
        if (t < 0.0) return std::nullopt;
        switch (surface_.kind) {
            case SurfaceKind::VerticalPlane:
            case SurfaceKind::TiltedPlane:
                return surface_.offset + surface_.slope * t;
            case SurfaceKind::Horosphere:
                return std::nullopt;
            default: {
                const double disc = sphere->radius * sphere->radius - (xi - sphere->center.tail(n)).squaredNorm();
                if (disc < 0.0) return std::nullopt;
                const double root = std::sqrt(disc);
                return sphere->center[0] + (sheet_ == Sheet::Far ? root : -root);
            }
        }
    }

    const double r2 = xi.squaredNorm();
    if (r2 > 1.0) return std::nullopt;
    const double s = std::sqrt(1.0 - r2);
    switch (surface_.kind) {
        case SurfaceKind::VerticalPlane:
        case SurfaceKind::TiltedPlane: {
            const double ratio = surface_.offset / (xi[0] - surface_.slope * s);
            if (!(ratio > 0.0) || !std::isfinite(ratio)) return std::nullopt;
            return std::log(ratio);
        }
        case SurfaceKind::Horosphere:
            if (!(s > 0.0)) return std::nullopt;
            return std::log(surface_.offset / s);
        default: {
            // |e^u x - C|^2 = rho^2 with |x| = 1
            Vec x(n + 1);
            x.head(n) = xi;
            x[n] = s;
            // b^2 - |C|^2 + rho^2 without cancellation for small spheres
            const double b = sphere->center.dot(x);
            const double disc = sphere->radius * sphere->radius - (sphere->center - b * x).squaredNorm();
            if (disc < 0.0) return std::nullopt;
            const double root = std::sqrt(disc);
            const double e = sheet_ == Sheet::Far ? b + root : b - root;
            if (!(e > 0.0)) return std::nullopt;
            return std::log(e);
        }
    }
}

SurfaceGraph surface_as_graph(const ModelSurface& s, const ChartCase& chart, Sheet sheet) {
    return SurfaceGraph(s, chart, sheet);
}

Vec reference_normal(const ModelSurface& s, const Vec& x) {
    const int d = static_cast<int>(x.size());
    Vec nu = Vec::Zero(d);
    switch (s.kind) {
        case SurfaceKind::VerticalPlane:
        case SurfaceKind::TiltedPlane:
            nu[0] = -1.0;
            nu[d - 1] = s.slope;
            nu /= std::sqrt(1.0 + s.slope * s.slope);
            break;
        case SurfaceKind::Horosphere:
            nu[d - 1] = 1.0;
            break;
        default: {
            const auto e = s.euclidean_sphere();
            nu = (e->center - x) / e->radius;
            break;
        }
    }
    return s.normal == NormalSide::Reference ? nu : Vec(-nu);
}

double graph_mean_curvature(const SurfaceGraph& g) {
    const ChartCase& chart = g.chart();
    // any interior point of the sheet's domain fixes the sign
    Vec probe;
    const int n = chart.n;
    for (int k = 1; k <= 4096 && probe.size() == 0; ++k) {
        Vec xi = Vec::Zero(n);
        const double r = 0.999 * std::sqrt(k / 4096.0);
        const double a = 2.399963229728653 * k;
        xi[0] = r * std::cos(a);
        xi[n - 1] = r * std::sin(a);
        if (chart.kind == ChartKind::Parabolic) {
            xi[n - 1] = std::abs(xi[n - 1]) * 8.0 + 1e-3;
            xi[0] *= 8.0;
            if (const auto e = g.surface().euclidean_sphere()) {
                xi[0] += e->center[1];
            }
        }
        if (chart.contains(xi) && g.value(xi)) probe = xi;
    }
    if (probe.size() == 0) throw DomainError("graph_mean_curvature: sheet has an empty domain");
    const HalfSpacePoint x = killing_flow(chart.field(), *g.value(probe), chart_embed(chart, probe));
    const Vec z = killing_eval(chart.field(), x).components;
    const double h = exact_mean_curvature(g.surface());
    return reference_normal(g.surface(), x.coords()).dot(z) <= 0.0 ? h : -h;
}

ModelSurface cmc_cap_for_boundary_sphere(const IdealSphere& e, double h, CapSide side) {
    if (!(std::abs(h) < 1.0)) {
        std::ostringstream os;
        os << "no CMC hypersphere with |H| = " << std::abs(h) << " >= 1 has a round ideal boundary";
        throw DomainError(os.str());
    }
    if (!(e.radius > 0.0)) throw DomainError("ideal sphere radius must be positive");
    if (h == 0.0) return ModelSurface::hemisphere(e.center, e.radius);
    if (side == CapSide::Inside) {
        return ModelSurface::spherical_cap(e.center, e.radius, std::acos(h));
    }
    return ModelSurface::spherical_cap(e.center, e.radius, std::acos(-h)).reversed();
}

namespace {

void check_barrier_args(double envelope, double h) {
    if (!std::isfinite(envelope)) {
        throw DomainError("barrier: boundary data is unbounded (not between tangent hyperspheres)");
    }
    if (!(std::abs(h) < 1.0)) throw DomainError("barrier: |H| must be < 1");
}

double slope_for(double h) { return h / std::sqrt(1.0 - h * h); }

}  // namespace

SurfaceGraph supersolution_barrier(const ChartCase& chart, double envelope, double h) {
    check_barrier_args(envelope, h);
    const double hp = std::max(h, 0.0);
    if (chart.kind == ChartKind::Parabolic) {
        return {ModelSurface::tilted_plane(envelope, slope_for(hp)), chart, Sheet::Far};
    }
    const IdealSphere e{Vec::Zero(chart.n), std::exp(envelope)};
    return {cmc_cap_for_boundary_sphere(e, hp, CapSide::Inside), chart, Sheet::Far};
}

SurfaceGraph subsolution_barrier(const ChartCase& chart, double envelope, double h) {
    check_barrier_args(envelope, h);
    const double hm = std::min(h, 0.0);
    if (chart.kind == ChartKind::Parabolic) {
        return {ModelSurface::tilted_plane(envelope, slope_for(hm)), chart, Sheet::Far};
    }
    const IdealSphere e{Vec::Zero(chart.n), std::exp(envelope)};
    return {cmc_cap_for_boundary_sphere(e, hm, CapSide::Inside), chart, Sheet::Far};
}

}  // namespace hypcmc
