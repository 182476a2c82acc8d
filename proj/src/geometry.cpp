#include "hypcmc/geometry.hpp"

#include <cmath>
#include <sstream>

namespace hypcmc {

namespace {

void require_finite(const Vec& v, const char* what) {
    if (!v.allFinite()) {
        throw DomainError(std::string(what) + ": non-finite coordinates");
    }
}

}  // namespace

HalfSpacePoint::HalfSpacePoint(Vec coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) {
        throw DomainError("HalfSpacePoint: need at least two coordinates");
    }
    require_finite(coords_, "HalfSpacePoint");
    if (!(height() > 0.0)) {
        std::ostringstream os;
        os << "HalfSpacePoint: height " << height() << " is not positive";
        throw DomainError(os.str());
    }
}

bool ChartCase::contains(const Vec& xi) const {
    if (xi.size() != n || !xi.allFinite()) return false;
    if (kind == ChartKind::Parabolic) return xi[n - 1] > 0.0;
    return xi.squaredNorm() < 1.0;
}

double ChartCase::warp(const Vec& xi) const {
    return 1.0 / std::sqrt(gamma_field(*this, xi).gamma);
}

ChartMetricData ambient_metric(const HalfSpacePoint& x) {
    const int d = x.dim();
    const double h = x.height();
    ChartMetricData m;
    m.g = Mat::Identity(d, d) / (h * h);
    m.g_inv = Mat::Identity(d, d) * (h * h);
    m.dg.assign(d, Mat::Zero(d, d));
    m.dg[d - 1] = Mat::Identity(d, d) * (-2.0 / (h * h * h));
    m.sqrt_det_g = std::pow(h, -d);
    return m;
}

TangentVector killing_eval(const KillingFieldSpec& field, const HalfSpacePoint& x) {
    if (field.kind == KillingKind::Parabolic) {
        Vec z = Vec::Zero(x.dim());
        z[0] = 1.0;
        return {x, z};
    }
    return {x, x.coords()};
}

HalfSpacePoint killing_flow(const KillingFieldSpec& field, double t, const HalfSpacePoint& x) {
    Vec y = x.coords();
    if (field.kind == KillingKind::Parabolic) {
        y[0] += t;
    } else {
        y *= std::exp(t);
    }
    return HalfSpacePoint(std::move(y));
}

GammaValue ambient_gamma(const KillingFieldSpec& field, const HalfSpacePoint& x) {
    const int d = x.dim();
    const double h = x.height();
    GammaValue out;
    out.dgamma = Vec::Zero(d);
    if (field.kind == KillingKind::Parabolic) {
        out.gamma = h * h;
        out.dgamma[d - 1] = 2.0 * h;
    } else {
        const double r2 = x.coords().squaredNorm();
        out.gamma = h * h / r2;
        out.dgamma = x.coords() * (-2.0 * h * h / (r2 * r2));
        out.dgamma[d - 1] += 2.0 * h / r2;
    }
    out.grad = out.dgamma * (h * h);
    return out;
}

Vec killing_acceleration(const KillingFieldSpec& field, const HalfSpacePoint& x) {
    const GammaValue gv = ambient_gamma(field, x);
    return gv.grad / (2.0 * gv.gamma * gv.gamma);
}

Vec killing_acceleration_christoffel(const KillingFieldSpec& field, const HalfSpacePoint& x) {
    const int d = x.dim();
    const ChartMetricData m = ambient_metric(x);
    const Vec z = killing_eval(field, x).components;
    // (d_i Z^k) Z^i: zero for the translation, Z for the dilation.
    Vec acc = field.kind == KillingKind::Parabolic ? Vec(Vec::Zero(d)) : z;
    for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                double christoffel = 0.0;
                for (int l = 0; l < d; ++l) {
                    christoffel += 0.5 * m.g_inv(k, l) * (m.dg[i](j, l) + m.dg[j](i, l) - m.dg[l](i, j));
                }
                s += christoffel * z[i] * z[j];
            }
        }
        acc[k] += s;
    }
    return acc;
}

double accel_consistency(const KillingFieldSpec& field, const HalfSpacePoint& x) {
    const Vec diff = killing_acceleration(field, x) - killing_acceleration_christoffel(field, x);
    return diff.norm() / x.height();
}

namespace {

void check_chart_point(const ChartCase& chart, const Vec& xi) {
    if (xi.size() != chart.n) {
        throw DomainError("chart coordinate has wrong dimension");
    }
    if (!chart.contains(xi)) {
        std::ostringstream os;
        os << (chart.kind == ChartKind::Parabolic ? "parabolic" : "hyperbolic")
           << " chart: point (" << xi.transpose() << ") outside the open chart domain";
        throw DomainError(os.str());
    }
}

}  // namespace

GammaValue gamma_field(const ChartCase& chart, const Vec& xi) {
    check_chart_point(chart, xi);
    const int n = chart.n;
    GammaValue out;
    out.dgamma = Vec::Zero(n);
    if (chart.kind == ChartKind::Parabolic) {
        const double t = xi[n - 1];
        out.gamma = t * t;
        out.dgamma[n - 1] = 2.0 * t;
        out.grad = out.dgamma * (t * t);
    } else {
        const double s2 = 1.0 - xi.squaredNorm();
        out.gamma = s2;
        out.dgamma = -2.0 * xi;
        // g^{-1} = s^2 (I - xi xi^T)
        out.grad = s2 * (out.dgamma - xi * xi.dot(out.dgamma));
    }
    return out;
}

HalfSpacePoint chart_embed(const ChartCase& chart, const Vec& xi) {
    check_chart_point(chart, xi);
    const int n = chart.n;
    Vec x(n + 1);
    if (chart.kind == ChartKind::Parabolic) {
        x[0] = 0.0;
        x.tail(n) = xi;
    } else {
        x.head(n) = xi;
        x[n] = std::sqrt(1.0 - xi.squaredNorm());
    }
    return HalfSpacePoint(std::move(x));
}

Mat chart_embed_jacobian(const ChartCase& chart, const Vec& xi) {
    check_chart_point(chart, xi);
    const int n = chart.n;
    Mat j = Mat::Zero(n + 1, n);
    if (chart.kind == ChartKind::Parabolic) {
        j.bottomRows(n) = Mat::Identity(n, n);
    } else {
        const double s = std::sqrt(1.0 - xi.squaredNorm());
        j.topRows(n) = Mat::Identity(n, n);
        j.row(n) = -xi.transpose() / s;
    }
    return j;
}

ChartMetricData chart_metric(const ChartCase& chart, const Vec& xi) {
    check_chart_point(chart, xi);
    const int n = chart.n;
    ChartMetricData m;
    if (chart.kind == ChartKind::Parabolic) {
        const double t = xi[n - 1];
        m.g = Mat::Identity(n, n) / (t * t);
        m.g_inv = Mat::Identity(n, n) * (t * t);
        m.dg.assign(n, Mat::Zero(n, n));
        m.dg[n - 1] = Mat::Identity(n, n) * (-2.0 / (t * t * t));
        m.sqrt_det_g = std::pow(t, -n);
        return m;
    }
    const double s2 = 1.0 - xi.squaredNorm();
    const double s4 = s2 * s2;
    const Mat outer = xi * xi.transpose();
    m.g = Mat::Identity(n, n) / s2 + outer / s4;
    m.g_inv = s2 * (Mat::Identity(n, n) - outer);
    m.dg.assign(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k) {
        Mat& dk = m.dg[k];
        dk = Mat::Identity(n, n) * (2.0 * xi[k] / s4) + outer * (4.0 * xi[k] / (s4 * s2));
        for (int i = 0; i < n; ++i) {
            dk(i, k) += xi[i] / s4;
            dk(k, i) += xi[i] / s4;
        }
    }
    m.sqrt_det_g = std::pow(s2, -0.5 * (n + 1));
    return m;
}

double hyperbolic_distance(const HalfSpacePoint& a, const HalfSpacePoint& b) {
    const double q = (a.coords() - b.coords()).squaredNorm() / (2.0 * a.height() * b.height());
    // arccosh(1 + q) written to stay accurate for small q
    return std::log1p(q + std::sqrt(q * (q + 2.0)));
}

double chart_distance(const ChartCase& chart, const Vec& center, const Vec& xi, Vec* d_dxi) {
    const HalfSpacePoint o = chart_embed(chart, center);
    const HalfSpacePoint p = chart_embed(chart, xi);
    const double ho = o.height();
    const double hp = p.height();
    const Vec diff = p.coords() - o.coords();
    const double q = diff.squaredNorm() / (2.0 * ho * hp);
    const double dist = std::log1p(q + std::sqrt(q * (q + 2.0)));
    if (d_dxi) {
        const int d = p.dim();
        Vec dq = diff / (ho * hp);
        dq[d - 1] -= diff.squaredNorm() / (2.0 * ho * hp * hp);
        const double denom = std::sqrt(q * (q + 2.0));
        if (denom > 0.0) {
            *d_dxi = chart_embed_jacobian(chart, xi).transpose() * dq / denom;
        } else {
            *d_dxi = Vec::Zero(chart.n);
        }
    }
    return dist;
}

}  // namespace hypcmc
