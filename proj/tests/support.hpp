#pragma once

#include "hypcmc/graph_ops.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace testing_support {

using namespace hypcmc;

inline Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

inline GridPtr box_grid(const ChartCase& chart, const Vec& lo, const Vec& hi, double h) {
    std::vector<int> counts(chart.n);
    for (int a = 0; a < chart.n; ++a) counts[a] = static_cast<int>(std::lround((hi[a] - lo[a]) / h)) + 1;
    return std::make_shared<const ChartGrid>(ChartGrid::box(chart, lo, hi, counts));
}

inline ChartCase parabolic(int n = 2) { return {ChartKind::Parabolic, n}; }
inline ChartCase hyperbolic(int n = 2) { return {ChartKind::Hyperbolic, n}; }

/// Random point of the half-space with coordinates in [-2, 2] and height in [0.1, 3].
inline HalfSpacePoint random_point(std::mt19937_64& rng, int dim) {
    std::uniform_real_distribution<double> xs(-2.0, 2.0), hs(0.1, 3.0);
    Vec x(dim);
    for (int i = 0; i + 1 < dim; ++i) x[i] = xs(rng);
    x[dim - 1] = hs(rng);
    return HalfSpacePoint(x);
}

inline double max_interior_residual(const GraphFunction& u, double h) { return residual(u, h).max_norm; }

}  // namespace testing_support
