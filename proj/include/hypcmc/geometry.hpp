#pragma once

// Half-space model R^{n+1}_+ of hyperbolic space: metric, the two canonical
// Killing fields, their flows, and charts of the totally geodesic slice M.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace hypcmc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A point of the open half-space; the last coordinate is the height.
class HalfSpacePoint {
public:
    HalfSpacePoint() = default;
    explicit HalfSpacePoint(Vec coords);

    const Vec& coords() const { return coords_; }
    double height() const { return coords_[coords_.size() - 1]; }
    /// Ambient dimension n+1.
    int dim() const { return static_cast<int>(coords_.size()); }

private:
    Vec coords_;
};

struct TangentVector {
    HalfSpacePoint base;
    Vec components;  // Euclidean components
};

enum class KillingKind { Hyperbolic, Parabolic };

/// Canonical Killing fields: Hyperbolic is the dilation x -> x with axis
/// endpoints 0 and infinity; Parabolic is the translation e_1 fixing infinity.
struct KillingFieldSpec {
    KillingKind kind = KillingKind::Parabolic;
    int n = 2;
};

enum class ChartKind { Parabolic, Hyperbolic };

/// Coordinate chart of the totally geodesic hypersurface M orthogonal to the
/// field.  Parabolic: M = {x_1 = 0}, xi = (x_2, ..., x_{n+1}).  Hyperbolic: M is
/// the unit upper hemisphere, xi = (x_1, ..., x_n) in the open unit disk.
struct ChartCase {
    ChartKind kind = ChartKind::Parabolic;
    int n = 2;

    KillingFieldSpec field() const {
        return {kind == ChartKind::Parabolic ? KillingKind::Parabolic : KillingKind::Hyperbolic, n};
    }
    bool contains(const Vec& xi) const;
    /// Warp function of the Killing cylinder M x_rho R, rho = 1/sqrt(gamma).
    double warp(const Vec& xi) const;

    friend bool operator==(const ChartCase&, const ChartCase&) = default;
};

struct ChartMetricData {
    Mat g;
    Mat g_inv;
    std::vector<Mat> dg;  // dg[k] = d g / d xi_k
    double sqrt_det_g = 0.0;
};

struct GammaValue {
    double gamma = 0.0;
    Vec grad;  // metric gradient g^{-1} d(gamma)
    Vec dgamma;  // coordinate differential
};

ChartMetricData ambient_metric(const HalfSpacePoint& x);

TangentVector killing_eval(const KillingFieldSpec& field, const HalfSpacePoint& x);
HalfSpacePoint killing_flow(const KillingFieldSpec& field, double t, const HalfSpacePoint& x);

/// gamma = 1 / <Z, Z> as an ambient function, with its ambient metric gradient.
GammaValue ambient_gamma(const KillingFieldSpec& field, const HalfSpacePoint& x);

/// gamma restricted to M in chart coordinates.
GammaValue gamma_field(const ChartCase& chart, const Vec& xi);

/// Ambient acceleration nabla_Z Z of the Killing field, evaluated through the
/// identity nabla_Z Z = grad(gamma) / (2 gamma^2).
Vec killing_acceleration(const KillingFieldSpec& field, const HalfSpacePoint& x);

/// Christoffel-symbol evaluation of nabla_Z Z.
Vec killing_acceleration_christoffel(const KillingFieldSpec& field, const HalfSpacePoint& x);

/// Hyperbolic norm of the difference between the two evaluations above.
double accel_consistency(const KillingFieldSpec& field, const HalfSpacePoint& x);

HalfSpacePoint chart_embed(const ChartCase& chart, const Vec& xi);
/// d(embedding)/d(xi), size (n+1) x n.
Mat chart_embed_jacobian(const ChartCase& chart, const Vec& xi);
ChartMetricData chart_metric(const ChartCase& chart, const Vec& xi);

double hyperbolic_distance(const HalfSpacePoint& a, const HalfSpacePoint& b);

/// Intrinsic distance on M (equal to the ambient distance since M is totally
/// geodesic) together with its chart differential with respect to `xi`.
double chart_distance(const ChartCase& chart, const Vec& center, const Vec& xi, Vec* d_dxi = nullptr);

}  // namespace hypcmc
