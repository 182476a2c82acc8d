#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace hypcmc;
using namespace testing_support;

namespace {

const KillingFieldSpec kPar{KillingKind::Parabolic, 2};
const KillingFieldSpec kHyp{KillingKind::Hyperbolic, 2};

// L_Z g as the central t-difference of the pulled-back metric psi_t^* g.  The
// flow differential comes from unit-step differences, exact for affine flows.
double killing_equation_residual(const KillingFieldSpec& f, const HalfSpacePoint& x) {
    const int d = x.dim();
    const double t = 1e-3;
    auto pullback = [&](double s) {
        Mat dpsi(d, d);
        const Vec base = killing_flow(f, s, x).coords();
        for (int i = 0; i < d; ++i) {
            Vec p = x.coords();
            p[i] += 1.0;
            dpsi.col(i) = killing_flow(f, s, HalfSpacePoint(p)).coords() - base;
        }
        return Mat(dpsi.transpose() * ambient_metric(HalfSpacePoint(base)).g * dpsi);
    };
    const Mat lie = (pullback(t) - pullback(-t)) / (2 * t);
    return lie.cwiseAbs().maxCoeff() / ambient_metric(x).g.cwiseAbs().maxCoeff();
}

}  // namespace

TEST(AmbientMetric, ConformalFactor) {
    const auto m = ambient_metric(HalfSpacePoint(vec({0, 0, 2})));
    EXPECT_TRUE(m.g.isApprox(Mat::Identity(3, 3) / 4.0, 1e-15));
    EXPECT_TRUE(ambient_metric(HalfSpacePoint(vec({5, 1, 1}))).g.isApprox(Mat::Identity(3, 3), 1e-15));
    const auto q = ambient_metric(HalfSpacePoint(vec({0.3, -1, 0.7})));
    EXPECT_LT((q.g * q.g_inv - Mat::Identity(3, 3)).norm(), 1e-12);
}

TEST(AmbientMetric, RejectsNonPositiveHeight) {
    EXPECT_THROW(HalfSpacePoint(vec({0, 0, 0})), DomainError);
    EXPECT_THROW(HalfSpacePoint(vec({0, 0, -1})), DomainError);
}

TEST(KillingField, Values) {
    const HalfSpacePoint x(vec({3, 4, 5}));
    EXPECT_EQ(killing_eval(kPar, x).components, vec({1, 0, 0}));
    EXPECT_EQ(killing_eval(kHyp, x).components, vec({3, 4, 5}));
}

TEST(KillingField, LieDerivativeOfMetricVanishes) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const HalfSpacePoint x = random_point(rng, 3);
        EXPECT_LT(killing_equation_residual(kPar, x), 1e-10);
        EXPECT_LT(killing_equation_residual(kHyp, x), 1e-10);
    }
}

TEST(KillingFlow, ClosedForms) {
    EXPECT_EQ(killing_flow(kPar, 1.5, HalfSpacePoint(vec({0, 1, 1}))).coords(), vec({1.5, 1, 1}));
    EXPECT_EQ(killing_flow(kHyp, 0.0, HalfSpacePoint(vec({3, 4, 5}))).coords(), vec({3, 4, 5}));
    EXPECT_LT((killing_flow(kHyp, std::log(2.0), HalfSpacePoint(vec({1, 0, 1}))).coords() - vec({2, 0, 2})).norm(),
              1e-15);
}

TEST(KillingFlow, MatchesQuadratureOfTheField) {
    // classical RK4 on x' = Z(x)
    const HalfSpacePoint x0(vec({1, 0, 1}));
    for (const auto& f : {kPar, kHyp}) {
        Vec x = x0.coords();
        const int steps = 2000;
        const double dt = std::log(2.0) / steps;
        auto z = [&](const Vec& p) { return killing_eval(f, HalfSpacePoint(p)).components; };
        for (int s = 0; s < steps; ++s) {
            const Vec k1 = z(x), k2 = z(x + 0.5 * dt * k1), k3 = z(x + 0.5 * dt * k2), k4 = z(x + dt * k3);
            x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        EXPECT_LT((x - killing_flow(f, std::log(2.0), x0).coords()).norm(), 1e-12);
    }
}

TEST(KillingFlow, GroupProperty) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ts(-2, 2);
    for (const auto& f : {kPar, kHyp}) {
        for (int i = 0; i < 100; ++i) {
            const HalfSpacePoint x = random_point(rng, 3);
            const double s = ts(rng), t = ts(rng);
            const Vec a = killing_flow(f, s, killing_flow(f, t, x)).coords();
            const Vec b = killing_flow(f, s + t, x).coords();
            EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 4e-15 * (1 + b.norm()));
        }
    }
}

TEST(KillingFlow, IsAnIsometry) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ts(-2, 2);
    for (const auto& f : {kPar, kHyp}) {
        for (int i = 0; i < 100; ++i) {
            const HalfSpacePoint a = random_point(rng, 3), b = random_point(rng, 3);
            const double t = ts(rng);
            const double d0 = hyperbolic_distance(a, b);
            const double d1 = hyperbolic_distance(killing_flow(f, t, a), killing_flow(f, t, b));
            EXPECT_NEAR(d0, d1, 1e-9);
        }
    }
}

TEST(Gamma, ChartValues) {
    EXPECT_DOUBLE_EQ(gamma_field(parabolic(), vec({0.3, 2.0})).gamma, 4.0);
    EXPECT_DOUBLE_EQ(gamma_field(hyperbolic(), vec({0, 0})).gamma, 1.0);
    EXPECT_THROW(gamma_field(hyperbolic(), vec({0.8, 0.6})), DomainError);
    EXPECT_THROW(gamma_field(parabolic(), vec({0.1, 0.0})), DomainError);
}

TEST(Gamma, AgreesWithAmbientNormOfTheField) {
    for (const auto& chart : {parabolic(), hyperbolic()}) {
        for (const Vec& xi : {vec({0.3, 0.5}), vec({-0.2, 0.1}), vec({0.05, 0.9})}) {
            const HalfSpacePoint x = chart_embed(chart, xi);
            const Vec z = killing_eval(chart.field(), x).components;
            const double zz = z.dot(ambient_metric(x).g * z);
            EXPECT_NEAR(gamma_field(chart, xi).gamma, 1.0 / zz, 1e-14);
        }
    }
}

TEST(Gamma, VanishesTowardTheIdealBoundary) {
    EXPECT_LT(gamma_field(parabolic(), vec({0.0, 1e-4})).gamma, 1e-7);
    EXPECT_LT(gamma_field(hyperbolic(), vec({0.0, 1 - 1e-8})).gamma, 1e-7);
}

TEST(Gamma, MetricGradientIsGinvTimesDifferential) {
    for (const auto& chart : {parabolic(), hyperbolic()}) {
        const Vec xi = vec({0.2, 0.4});
        const auto gv = gamma_field(chart, xi);
        const auto m = chart_metric(chart, xi);
        EXPECT_LT((gv.grad - m.g_inv * gv.dgamma).norm(), 1e-14);
        for (int k = 0; k < 2; ++k) {
            Vec p = xi, q = xi;
            p[k] += 1e-6;
            q[k] -= 1e-6;
            EXPECT_NEAR(gv.dgamma[k], (gamma_field(chart, p).gamma - gamma_field(chart, q).gamma) / 2e-6, 1e-8);
        }
    }
}

TEST(Gamma, FlowInvariant) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ts(-3, 3);
    for (const auto& f : {kPar, kHyp}) {
        for (int i = 0; i < 100; ++i) {
            const HalfSpacePoint x = random_point(rng, 3);
            const double g0 = ambient_gamma(f, x).gamma;
            const double g1 = ambient_gamma(f, killing_flow(f, ts(rng), x)).gamma;
            EXPECT_NEAR(g0, g1, 1e-12 * std::max(1.0, g0));
        }
    }
}

TEST(Acceleration, ChristoffelValueAtSamplePoint) {
    const Vec a = killing_acceleration_christoffel(kPar, HalfSpacePoint(vec({0, 0, 2})));
    EXPECT_LT((a - vec({0, 0, 0.5})).norm(), 1e-15);
}

TEST(Acceleration, KillingIdentityAtRandomPoints) {
    std::mt19937_64 rng(13);
    for (const auto& f : {kPar, kHyp}) {
        for (int i = 0; i < 100; ++i) EXPECT_LT(accel_consistency(f, random_point(rng, 3)), 1e-10);
    }
}

TEST(Chart, Embedding) {
    EXPECT_EQ(chart_embed(parabolic(), vec({1, 2})).coords(), vec({0, 1, 2}));
    EXPECT_EQ(chart_embed(hyperbolic(), vec({0, 0})).coords(), vec({0, 0, 1}));
    EXPECT_THROW(chart_embed(hyperbolic(), vec({1, 0})), DomainError);
    EXPECT_THROW(chart_embed(parabolic(), vec({1, 0})), DomainError);
}

TEST(Chart, HyperbolicMetricAtPoleIsIdentity) {
    EXPECT_LT((chart_metric(hyperbolic(), vec({0, 0})).g - Mat::Identity(2, 2)).norm(), 1e-15);
}

TEST(Chart, MetricIsFiniteDifferencePullback) {
    for (const auto& chart : {parabolic(), hyperbolic()}) {
        const double lo = chart.kind == ChartKind::Parabolic ? 0.1 : -0.9;
        for (int i = 0; i <= 8; ++i) {
            for (int j = 0; j <= 8; ++j) {
                Vec xi = vec({-0.9 + 0.225 * i, lo + (0.9 - lo) * j / 8.0});
                if (!chart.contains(xi) || xi.norm() > 0.95) continue;
                Mat jac(3, 2);
                for (int k = 0; k < 2; ++k) {
                    Vec p = xi, q = xi;
                    p[k] += 1e-6;
                    q[k] -= 1e-6;
                    jac.col(k) = (chart_embed(chart, p).coords() - chart_embed(chart, q).coords()) / 2e-6;
                }
                const Mat pull = jac.transpose() * ambient_metric(chart_embed(chart, xi)).g * jac;
                const Mat g = chart_metric(chart, xi).g;
                EXPECT_LT((pull - g).cwiseAbs().maxCoeff(), 1e-8 * (1 + g.norm()));
                EXPECT_LT((jac - chart_embed_jacobian(chart, xi)).cwiseAbs().maxCoeff(), 1e-8);
            }
        }
    }
}

TEST(Chart, MetricDerivativesAndDeterminant) {
    for (const auto& chart : {parabolic(), hyperbolic()}) {
        const Vec xi = vec({0.3, 0.45});
        const auto m = chart_metric(chart, xi);
        EXPECT_NEAR(m.sqrt_det_g, std::sqrt(m.g.determinant()), 1e-13);
        EXPECT_LT((m.g * m.g_inv - Mat::Identity(2, 2)).norm(), 1e-12);
        for (int k = 0; k < 2; ++k) {
            Vec p = xi, q = xi;
            p[k] += 1e-6;
            q[k] -= 1e-6;
            const Mat fd = (chart_metric(chart, p).g - chart_metric(chart, q).g) / 2e-6;
            EXPECT_LT((fd - m.dg[k]).cwiseAbs().maxCoeff(), 1e-7);
        }
    }
}

TEST(Chart, WarpFunction) {
    EXPECT_DOUBLE_EQ(parabolic().warp(vec({0, 2})), 0.5);
    EXPECT_DOUBLE_EQ(hyperbolic().warp(vec({0, 0})), 1.0);
}

TEST(Chart, HigherDimension) {
    const ChartCase c = hyperbolic(3);
    const Vec xi = vec({0.1, -0.2, 0.3});
    EXPECT_NEAR(chart_embed(c, xi).coords().norm(), 1.0, 1e-15);
    EXPECT_NEAR(gamma_field(c, xi).gamma, 1 - xi.squaredNorm(), 1e-15);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
        EXPECT_LT(accel_consistency({KillingKind::Hyperbolic, 3}, random_point(rng, 4)), 1e-10);
    }
}
