#include "hypcmc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hypcmc {

ChartGrid::ChartGrid(const ChartCase& chart, const Vec& lo, const Vec& hi, const std::vector<int>& counts)
    : chart_(chart), lo_(lo), hi_(hi), counts_(counts), n_(chart.n), nn_(chart.n * chart.n) {
    if (lo.size() != n_ || hi.size() != n_ || static_cast<int>(counts.size()) != n_) {
        throw DomainError("ChartGrid: box dimension differs from chart dimension");
    }
    std::size_t total = 1;
    stride_.resize(n_);
    spacing_.resize(n_);
    for (int a = 0; a < n_; ++a) {
        if (counts[a] < 3) throw DomainError("ChartGrid: need at least 3 nodes per axis");
        if (!(hi[a] > lo[a])) throw DomainError("ChartGrid: empty box");
        stride_[a] = static_cast<int>(total);
        total *= static_cast<std::size_t>(counts[a]);
        spacing_[a] = (hi[a] - lo[a]) / (counts[a] - 1);
    }
    kind_.assign(total, NodeKind::Inactive);
    tag_.assign(total, EdgeTag::None);
}

std::vector<int> ChartGrid::multi_index(std::size_t node) const {
    std::vector<int> idx(n_);
    for (int a = 0; a < n_; ++a) {
        idx[a] = static_cast<int>(node % counts_[a]);
        node /= counts_[a];
    }
    return idx;
}

std::size_t ChartGrid::node_at(const std::vector<int>& idx) const {
    std::size_t node = 0;
    for (int a = 0; a < n_; ++a) node += static_cast<std::size_t>(idx[a]) * stride_[a];
    return node;
}

Vec ChartGrid::coords(std::size_t node) const {
    Vec x(n_);
    for (int a = 0; a < n_; ++a) {
        const int i = static_cast<int>(node % counts_[a]);
        node /= counts_[a];
        x[a] = i == counts_[a] - 1 ? hi_[a] : lo_[a] + i * spacing_[a];
    }
    return x;
}

ChartGrid ChartGrid::box(const ChartCase& chart, const Vec& lo, const Vec& hi, const std::vector<int>& counts) {
    ChartGrid g(chart, lo, hi, counts);
    const int n = chart.n;
    for (std::size_t node = 0; node < g.size(); ++node) {
        const auto idx = g.multi_index(node);
        bool on_face = false;
        for (int a = 0; a < n; ++a) on_face = on_face || idx[a] == 0 || idx[a] == counts[a] - 1;
        if (!on_face) {
            g.kind_[node] = NodeKind::Interior;
            continue;
        }
        g.kind_[node] = NodeKind::Boundary;
        const bool ideal = chart.kind == ChartKind::Parabolic && idx[n - 1] == 0;
        g.tag_[node] = ideal ? EdgeTag::Ideal : EdgeTag::Artificial;
    }
    g.finalize();
    return g;
}

ChartGrid ChartGrid::masked(const ChartCase& chart, const Vec& lo, const Vec& hi, const std::vector<int>& counts,
                            const std::function<bool(const Vec&)>& inside, EdgeTag tag) {
    ChartGrid g(chart, lo, hi, counts);
    const int n = chart.n;
    int stencil = 1;
    for (int a = 0; a < n; ++a) stencil *= 3;
    for (std::size_t node = 0; node < g.size(); ++node) {
        const auto idx = g.multi_index(node);
        bool ok = true;
        for (int a = 0; a < n; ++a) ok = ok && idx[a] > 0 && idx[a] < counts[a] - 1;
        if (ok && inside(g.coords(node))) g.kind_[node] = NodeKind::Interior;
    }
    for (std::size_t node = 0; node < g.size(); ++node) {
        if (g.kind_[node] != NodeKind::Interior) continue;
        const auto idx = g.multi_index(node);
        for (int s = 0; s < stencil; ++s) {
            std::vector<int> j = idx;
            int code = s;
            for (int a = 0; a < n; ++a) {
                j[a] += code % 3 - 1;
                code /= 3;
            }
            const std::size_t nb = g.node_at(j);
            if (g.kind_[nb] == NodeKind::Inactive) {
                g.kind_[nb] = NodeKind::Boundary;
                g.tag_[nb] = tag;
            }
        }
    }
    g.finalize();
    return g;
}

void ChartGrid::finalize() {
    unknown_.assign(size(), -1);
    interior_.clear();
    boundary_.clear();
    for (std::size_t node = 0; node < size(); ++node) {
        if (kind_[node] == NodeKind::Interior) {
            unknown_[node] = static_cast<long>(interior_.size());
            interior_.push_back(node);
        } else if (kind_[node] == NodeKind::Boundary) {
            boundary_.push_back(node);
        }
    }
    if (interior_.empty()) throw DomainError("ChartGrid: no interior nodes");

    node_sqrtg_.assign(size(), 0.0);
    node_gamma_.assign(size(), 0.0);
    node_ginv_.assign(size() * nn_, 0.0);
    node_dgamma_.assign(size() * n_, 0.0);
    face_sqrtg_.assign(size() * n_, 0.0);
    face_gamma_.assign(size() * n_, 0.0);
    face_ginv_.assign(size() * n_ * nn_, 0.0);

    auto fill = [&](const Vec& xi, double* ginv, double& sqrtg, double& gamma, double* dgamma) {
        const ChartMetricData m = chart_metric(chart_, xi);
        const GammaValue gv = gamma_field(chart_, xi);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) ginv[i * n_ + j] = m.g_inv(i, j);
            if (dgamma) dgamma[i] = gv.dgamma[i];
        }
        sqrtg = m.sqrt_det_g;
        gamma = gv.gamma;
    };

    for (std::size_t node : interior_) {
        const Vec xi = coords(node);
        if (!chart_.contains(xi)) {
            std::ostringstream os;
            os << "ChartGrid: interior node (" << xi.transpose() << ") outside the chart";
            throw DomainError(os.str());
        }
        fill(xi, &node_ginv_[node * nn_], node_sqrtg_[node], node_gamma_[node], &node_dgamma_[node * n_]);
        for (int a = 0; a < n_; ++a) {
            for (int side = -1; side <= 0; ++side) {
                const std::size_t base = side < 0 ? node - stride_[a] : node;
                const std::size_t f = base * n_ + a;
                if (face_sqrtg_[f] != 0.0) continue;
                Vec mid = coords(base);
                mid[a] += 0.5 * spacing_[a];
                if (!chart_.contains(mid)) {
                    std::ostringstream os;
                    os << "ChartGrid: flux face at (" << mid.transpose() << ") outside the chart";
                    throw DomainError(os.str());
                }
                fill(mid, &face_ginv_[f * nn_], face_sqrtg_[f], face_gamma_[f], nullptr);
            }
        }
    }
}

bool ChartGrid::same_layout(const ChartGrid& other) const {
    return chart_ == other.chart_ && counts_ == other.counts_ && lo_ == other.lo_ && hi_ == other.hi_ &&
           kind_ == other.kind_;
}

GraphFunction sample_graph(const SurfaceGraph& s, const GridPtr& grid) {
    GraphFunction f(grid);
    for (std::size_t node = 0; node < grid->size(); ++node) {
        if (grid->kind(node) == NodeKind::Inactive) continue;
        const auto v = s.value(grid->coords(node));
        if (!v) {
            std::ostringstream os;
            os << "sample_graph: node (" << grid->coords(node).transpose() << ") is off the surface's graph domain";
            throw DomainError(os.str());
        }
        f[node] = *v;
    }
    return f;
}

std::optional<double> interpolate(const GraphFunction& u, const Vec& xi) {
    const ChartGrid& g = *u.grid;
    const int n = g.dim();
    std::vector<int> base(n);
    std::vector<double> frac(n);
    for (int a = 0; a < n; ++a) {
        const double s = (xi[a] - g.lo()[a]) / g.spacing(a);
        if (s < -1e-12 || s > g.counts()[a] - 1 + 1e-12) return std::nullopt;
        int i = static_cast<int>(std::floor(s));
        i = std::clamp(i, 0, g.counts()[a] - 2);
        base[a] = i;
        frac[a] = std::clamp(s - i, 0.0, 1.0);
    }
    double value = 0.0;
    for (int corner = 0; corner < (1 << n); ++corner) {
        std::vector<int> j = base;
        double w = 1.0;
        for (int a = 0; a < n; ++a) {
            const bool up = (corner >> a) & 1;
            j[a] += up ? 1 : 0;
            w *= up ? frac[a] : 1.0 - frac[a];
        }
        if (w == 0.0) continue;
        const std::size_t node = g.node_at(j);
        if (g.kind(node) == NodeKind::Inactive) return std::nullopt;
        value += w * u[node];
    }
    return value;
}

}  // namespace hypcmc
