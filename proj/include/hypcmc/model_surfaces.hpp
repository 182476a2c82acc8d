#pragma once

// Exact constant-mean-curvature hypersurfaces of the half-space model.
//
// Sign convention used throughout the library: H is the average of the
// principal curvatures with the mean curvature vector equal to H * eta, where
// eta is the chosen unit normal.  For a Killing graph eta is the normal with
// <eta, Z> <= 0.  With this convention the tilted plane x_1 = c + m x_{n+1}
// has H = m / sqrt(1 + m^2) and the horosphere has H = 1 for the upward normal.

#include "hypcmc/geometry.hpp"

#include <optional>

namespace hypcmc {

enum class SurfaceKind { VerticalPlane, TiltedPlane, Hemisphere, SphericalCap, Horosphere, Sphere };

/// Which unit normal the curvature refers to.  Reference normals: planes use
/// the normal with negative x_1 component, horospheres the upward normal, and
/// every sphere-like surface the Euclidean normal pointing to its center.
enum class NormalSide { Reference, Reversed };

struct EuclideanSphere {
    Vec center;  // in R^{n+1}
    double radius = 0.0;
};

/// A round sphere in the ideal boundary {x_{n+1} = 0} = R^n.
struct IdealSphere {
    Vec center;  // in R^n
    double radius = 0.0;
};

struct ModelSurface {
    SurfaceKind kind = SurfaceKind::VerticalPlane;
    double offset = 0.0;  // planes: x_1 = offset (+ slope x_{n+1}); horosphere height
    double slope = 0.0;
    Vec center;           // Hemisphere/SphericalCap: in R^n; Sphere: in R^{n+1}
    double radius = 0.0;  // Hemisphere/SphericalCap: ideal radius; Sphere: Euclidean radius
    double angle = 0.0;   // SphericalCap contact angle in (0, pi)
    NormalSide normal = NormalSide::Reference;

    static ModelSurface vertical_plane(double c);
    static ModelSurface tilted_plane(double c, double m);
    static ModelSurface hemisphere(Vec center, double radius);
    static ModelSurface spherical_cap(Vec center, double radius, double theta);
    static ModelSurface horosphere(double height);
    /// Any Euclidean sphere inside the half-space (e.g. a geodesic sphere).
    static ModelSurface sphere(Vec center, double radius);

    ModelSurface reversed() const;

    /// Euclidean sphere carrying a sphere-like surface; nullopt for planes and
    /// horospheres.
    std::optional<EuclideanSphere> euclidean_sphere() const;
};

double exact_mean_curvature(const ModelSurface& s);

/// Killing graphs of a model surface have up to two sheets; Far is the one
/// reached later along the flow.
enum class Sheet { Far, Near };

/// Lazily evaluated Killing graph of one sheet of a model surface.
class SurfaceGraph {
public:
    SurfaceGraph(ModelSurface surface, ChartCase chart, Sheet sheet);

    const ModelSurface& surface() const { return surface_; }
    const ChartCase& chart() const { return chart_; }
    Sheet sheet() const { return sheet_; }

    /// False when the surface is nowhere transverse to the flow.
    bool graphable() const;

    /// Flow time u(xi) of the sheet over xi, or nullopt off its domain.  Points
    /// of the ideal boundary of M (t = 0, |xi| = 1) are accepted.
    std::optional<double> value(const Vec& xi) const;
    bool contains(const Vec& xi) const { return value(xi).has_value(); }

private:
    ModelSurface surface_;
    ChartCase chart_;
    Sheet sheet_;
};

SurfaceGraph surface_as_graph(const ModelSurface& s, const ChartCase& chart, Sheet sheet = Sheet::Far);

/// Euclidean unit normal of s at a point x of s, on the side selected by s.normal.
Vec reference_normal(const ModelSurface& s, const Vec& x);

/// Mean curvature of the sheet oriented as a Killing graph (normal eta with
/// <eta, Z> <= 0).  Differs from exact_mean_curvature at most by sign.
double graph_mean_curvature(const SurfaceGraph& g);

enum class CapSide {
    Inside,   // mean curvature vector points into the ball bounded by E
    Outside,
};

/// The CMC-H hypersphere with ideal boundary exactly E.  Throws for |H| >= 1.
ModelSurface cmc_cap_for_boundary_sphere(const IdealSphere& e, double h, CapSide side);

/// Global graph lying above every solution with boundary values <= `envelope`.
/// Parabolic chart: envelope is sup phi.  Hyperbolic chart: envelope is the
/// log-radius of an enclosing ideal sphere centered at the origin.
SurfaceGraph supersolution_barrier(const ChartCase& chart, double envelope, double h);

/// Global graph lying below every solution with boundary values >= `envelope`.
SurfaceGraph subsolution_barrier(const ChartCase& chart, double envelope, double h);

}  // namespace hypcmc
