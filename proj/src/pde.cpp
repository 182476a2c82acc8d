#include "hypcmc/pde.hpp"

#include "hypcmc/parallel.hpp"

#include <cmath>
#include <sstream>

namespace hypcmc {

void check_curvature_range(double h) {
    if (!(std::abs(h) < 1.0)) {
        std::ostringstream os;
        os << "|H| = " << std::abs(h) << " is not below 1";
        throw CurvatureRangeError(os.str());
    }
}

namespace {

constexpr int kMaxDim = 6;

int pow3(int n) {
    int p = 1;
    for (int i = 0; i < n; ++i) p *= 3;
    return p;
}

// Residual at interior node p.  When `d` is non-null it receives the partial
// derivatives with respect to the 3^n stencil values, slot sum_a (o_a + 1) 3^a.
double node_residual(const ChartGrid& g, const std::vector<double>& u, std::size_t p, double h, double* d,
                     bool frozen = false) {
    const int n = g.dim();
    int p3[kMaxDim + 1];
    p3[0] = 1;
    for (int a = 0; a < n; ++a) p3[a + 1] = 3 * p3[a];
    const int center = (p3[n] - 1) / 2;
    if (d) std::fill(d, d + p3[n], 0.0);

    const double sg = g.node_sqrt_det(p);
    double div = 0.0;
    double pv[kMaxDim], gp[kMaxDim];
    for (int a = 0; a < n; ++a) {
        const int sa = g.stride(a);
        const double ha = g.spacing(a);
        for (int side = -1; side <= 0; ++side) {
            const std::size_t b = side < 0 ? p - sa : p;
            for (int c = 0; c < n; ++c) {
                if (c == a) {
                    pv[c] = (u[b + sa] - u[b]) / ha;
                } else {
                    const int sc = g.stride(c);
                    pv[c] = (u[b + sc] - u[b - sc] + u[b + sa + sc] - u[b + sa - sc]) / (4.0 * g.spacing(c));
                }
            }
            const double* G = g.face_ginv(b, a);
            double pgp = 0.0;
            for (int i = 0; i < n; ++i) {
                gp[i] = 0.0;
                for (int j = 0; j < n; ++j) gp[i] += G[i * n + j] * pv[j];
                pgp += pv[i] * gp[i];
            }
            const double w = std::sqrt(g.face_gamma(b, a) + pgp);
            const double fs = g.face_sqrt_det(b, a);
            const double flux = fs * gp[a] / w;
            const double sign = side < 0 ? -1.0 : 1.0;
            div += sign * flux / ha;
            if (!d) continue;
            const double coef = sign / (ha * sg);
            const double w3 = w * w * w;
            const int sb = center + side * p3[a];
            for (int c = 0; c < n; ++c) {
                const double dfdp = coef * fs * (G[a * n + c] / w - (frozen ? 0.0 : gp[a] * gp[c] / w3));
                if (c == a) {
                    d[sb + p3[a]] += dfdp / ha;
                    d[sb] -= dfdp / ha;
                } else {
                    const double k = dfdp / (4.0 * g.spacing(c));
                    d[sb + p3[c]] += k;
                    d[sb - p3[c]] -= k;
                    d[sb + p3[a] + p3[c]] += k;
                    d[sb + p3[a] - p3[c]] -= k;
                }
            }
        }
    }
    div /= sg;

    const double* G = g.node_ginv(p);
    const double* dgam = g.node_dgamma(p);
    const double gam = g.node_gamma(p);
    double q[kMaxDim], gq[kMaxDim], gd[kMaxDim];
    for (int b = 0; b < n; ++b) q[b] = (u[p + g.stride(b)] - u[p - g.stride(b)]) / (2.0 * g.spacing(b));
    double qgq = 0.0, qgd = 0.0;
    for (int i = 0; i < n; ++i) {
        gq[i] = 0.0;
        gd[i] = 0.0;
        for (int j = 0; j < n; ++j) {
            gq[i] += G[i * n + j] * q[j];
            gd[i] += G[i * n + j] * dgam[j];
        }
        qgq += q[i] * gq[i];
        qgd += q[i] * gd[i];
    }
    const double w = std::sqrt(gam + qgq);
    const double lower = qgd / (2.0 * gam * w);
    if (d) {
        const double w3 = w * w * w;
        for (int c = 0; c < n; ++c) {
            const double dl = (gd[c] / w - (frozen ? 0.0 : qgd * gq[c] / w3)) / (2.0 * gam);
            const double k = dl / (2.0 * g.spacing(c));
            d[center + p3[c]] -= k;
            d[center - p3[c]] += k;
        }
    }
    return div - lower + n * h;
}

void check_grid(const GraphFunction& u) {
    if (!u.grid) throw DomainError("graph function has no grid");
    if (u.grid->dim() > kMaxDim) throw DomainError("pde: dimension too large");
    if (u.u.size() != u.grid->size()) throw DomainError("graph function size differs from its grid");
}

}  // namespace

Vec node_gradient(const GraphFunction& u, std::size_t node) {
    const ChartGrid& g = *u.grid;
    const int n = g.dim();
    Vec q(n);
    for (int b = 0; b < n; ++b) q[b] = (u[node + g.stride(b)] - u[node - g.stride(b)]) / (2.0 * g.spacing(b));
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> G(
        g.node_ginv(node), n, n);
    return G * q;
}

double gradient_norm(const GraphFunction& u, std::size_t node) {
    const ChartGrid& g = *u.grid;
    const int n = g.dim();
    Vec q(n);
    for (int b = 0; b < n; ++b) q[b] = (u[node + g.stride(b)] - u[node - g.stride(b)]) / (2.0 * g.spacing(b));
    return std::sqrt(std::max(0.0, q.dot(node_gradient(u, node))));
}

double flux_w(const GraphFunction& u, std::size_t node) {
    const double s = gradient_norm(u, node);
    return std::sqrt(u.grid->node_gamma(node) + s * s);
}

ResidualField residual(const GraphFunction& u, double h) {
    check_curvature_range(h);
    check_grid(u);
    const ChartGrid& g = *u.grid;
    ResidualField r;
    r.grid = u.grid;
    r.values.assign(g.size(), 0.0);
    const auto& interior = g.interior();
    parallel_chunks(interior.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) r.values[interior[i]] = node_residual(g, u.u, interior[i], h, nullptr);
    });
    double cell = 1.0;
    for (int a = 0; a < g.dim(); ++a) cell *= g.spacing(a);
    double sum = 0.0;
    for (std::size_t node : interior) {
        const double v = r.values[node];
        r.max_norm = std::max(r.max_norm, std::abs(v));
        sum += v * v * g.node_sqrt_det(node) * cell;
    }
    r.l2_norm = std::sqrt(sum);
    return r;
}

Linearization linearize(const GraphFunction& u, double h, LinearizationKind kind) {
    check_curvature_range(h);
    check_grid(u);
    const ChartGrid& g = *u.grid;
    const int n = g.dim();
    const int slots = pow3(n);
    const auto& interior = g.interior();
    const auto ranges = chunk_ranges(interior.size());
    std::vector<std::vector<Eigen::Triplet<double>>> parts(ranges.size());

    // node offset of each stencil slot
    std::vector<long> slot_offset(slots, 0);
    for (int s = 0; s < slots; ++s) {
        int code = s;
        for (int a = 0; a < n; ++a) {
            slot_offset[s] += static_cast<long>(code % 3 - 1) * g.stride(a);
            code /= 3;
        }
    }

    Linearization lin;
    lin.residual.resize(static_cast<Eigen::Index>(interior.size()));
    parallel_chunks(interior.size(), [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::vector<double> d(slots);
        auto& trip = parts[chunk];
        trip.reserve((end - begin) * static_cast<std::size_t>(slots));
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t p = interior[i];
            lin.residual[static_cast<Eigen::Index>(i)] =
                node_residual(g, u.u, p, h, d.data(), kind == LinearizationKind::FrozenCoefficients);
            for (int s = 0; s < slots; ++s) {
                const long col = g.unknown(static_cast<std::size_t>(static_cast<long>(p) + slot_offset[s]));
                if (col >= 0) trip.emplace_back(static_cast<int>(i), static_cast<int>(col), d[s]);
            }
        }
    });
    std::vector<Eigen::Triplet<double>> all;
    for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
    const auto m = static_cast<Eigen::Index>(interior.size());
    lin.jacobian.resize(m, m);
    lin.jacobian.setFromTriplets(all.begin(), all.end());
    lin.jacobian.makeCompressed();
    return lin;
}

double killing_term(const GraphFunction& u, std::size_t node) {
    const ChartGrid& g = *u.grid;
    const Vec grad = node_gradient(u, node);
    const Eigen::Map<const Vec> dgam(g.node_dgamma(node), g.dim());
    return grad.dot(dgam) / (2.0 * g.node_gamma(node) * flux_w(u, node));
}

double killing_term_direct(const GraphFunction& u, std::size_t node) {
    const ChartGrid& g = *u.grid;
    const Vec xi = g.coords(node);
    const HalfSpacePoint x = chart_embed(g.chart(), xi);
    const Vec v = chart_embed_jacobian(g.chart(), xi) * node_gradient(u, node);
    const Vec acc = killing_acceleration_christoffel(g.chart().field(), x);
    const double inner = v.dot(acc) / (x.height() * x.height());
    return g.node_gamma(node) / flux_w(u, node) * inner;
}

}  // namespace hypcmc
