#include "hypcmc/boundary_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace hypcmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double param(const BoundarySpec& spec, const std::string& key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

Vec unit_from_angle(double theta) {
    Vec w(2);
    w << std::cos(theta), std::sin(theta);
    return w;
}

double angle_of(const Vec& w) {
    double a = std::atan2(w[1], w[0]);
    return a < 0.0 ? a + kTwoPi : a;
}

/// Golden-section minimization of a scalar function on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

/// Minimize f over a 1-D interval by a uniform scan followed by golden-section
/// refinement of the best local minima.  Returns the minimum value.
template <class F>
double scan_and_refine(F&& f, double lo, double hi, int samples, bool periodic) {
    std::vector<double> xs(samples), fs(samples);
    const double step = periodic ? (hi - lo) / samples : (hi - lo) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        xs[i] = lo + i * step;
        fs[i] = f(xs[i]);
    }
    std::vector<int> candidates;
    for (int i = 0; i < samples; ++i) {
        const int l = periodic ? (i + samples - 1) % samples : std::max(i - 1, 0);
        const int r = periodic ? (i + 1) % samples : std::min(i + 1, samples - 1);
        if (fs[i] <= fs[l] && fs[i] <= fs[r]) candidates.push_back(i);
    }
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    if (candidates.size() > 6) candidates.resize(6);
    double best = *std::min_element(fs.begin(), fs.end());
    for (int i : candidates) {
        const double a = xs[i] - step;
        const double b = xs[i] + step;
        const double ca = periodic ? a : std::max(a, lo);
        const double cb = periodic ? b : std::min(b, hi);
        best = std::min(best, golden_min(f, ca, cb, 1e-15 * (1.0 + std::abs(xs[i]))).second);
    }
    return best;
}

std::vector<double> sorted_unique_check(const std::vector<double>& sites) {
    for (std::size_t i = 1; i < sites.size(); ++i) {
        if (!(sites[i] > sites[i - 1])) {
            throw BoundaryError("boundary table: sample sites must be strictly increasing");
        }
    }
    return sites;
}

}  // namespace

BoundaryGraph::BoundaryGraph(ChartCase chart, Function phi, double inf, double sup,
                             BoundaryRepresentation rep, std::string name)
    : chart_(chart), phi_(std::move(phi)), inf_(inf), sup_(sup), rep_(rep), name_(std::move(name)) {}

double BoundaryGraph::at_chart_point(const Vec& xi) const {
    if (chart_.kind == ChartKind::Parabolic) return phi_(xi.head(chart_.n - 1));
    const double r = xi.norm();
    if (!(r > 0.0)) throw DomainError("boundary datum: the origin has no ideal direction");
    return phi_(xi / r);
}

Vec BoundaryGraph::gamma_point(const Vec& arg) const {
    const int n = chart_.n;
    if (chart_.kind == ChartKind::Parabolic) {
        Vec p(n);
        p[0] = phi_(arg);
        p.tail(n - 1) = arg;
        return p;
    }
    return std::exp(phi_(arg)) * arg;
}

std::vector<Vec> BoundaryGraph::sample_sites() const {
    if (!sites_.empty()) return sites_;
    std::vector<Vec> out;
    const int n = chart_.n;
    if (chart_.kind == ChartKind::Hyperbolic) {
        if (n != 2) throw BoundaryError("hyperbolic boundary data are supported for n = 2 only");
        const int m = 4096;
        for (int i = 0; i < m; ++i) out.push_back(unit_from_angle(kTwoPi * i / m));
        return out;
    }
    const int dims = n - 1;
    const int per_dim = dims == 1 ? 20001 : (dims == 2 ? 201 : 41);
    const double window = 10.0;
    std::vector<int> idx(dims, 0);
    while (true) {
        Vec y(dims);
        for (int k = 0; k < dims; ++k) y[k] = -window + 2.0 * window * idx[k] / (per_dim - 1);
        out.push_back(y);
        int k = 0;
        while (k < dims && ++idx[k] == per_dim) idx[k++] = 0;
        if (k == dims) break;
    }
    return out;
}

BoundaryGraph BoundaryGraph::shifted(double delta) const {
    BoundaryGraph g = *this;
    auto f = phi_;
    g.phi_ = [f, delta](const Vec& a) { return f(a) + delta; };
    g.inf_ += delta;
    g.sup_ += delta;
    return g;
}

BoundaryGraph BoundaryGraph::negated() const {
    BoundaryGraph g = *this;
    auto f = phi_;
    g.phi_ = [f](const Vec& a) { return -f(a); };
    g.inf_ = -sup_;
    g.sup_ = -inf_;
    return g;
}

BoundaryGraph make_boundary_graph(const ChartCase& chart, const BoundarySpec& spec) {
    if (spec.preset.empty()) {
        BoundaryGraph g = read_boundary_table(chart, spec.table_path);
        validate_boundary(g);
        return g;
    }
    const double a = param(spec, "a", 0.0);
    const double b = param(spec, "b", 0.0);
    const double width = param(spec, "width", 0.25);
    const auto& p = spec.preset;
    const bool parabolic = chart.kind == ChartKind::Parabolic;
    std::optional<BoundaryGraph> g;

    if (p == "constant") {
        g.emplace(chart, [a](const Vec&) { return a; }, a, a);
    } else if (p == "angular_sine") {
        if (parabolic || chart.n != 2) throw BoundaryError("preset angular_sine needs the hyperbolic chart with n = 2");
        g.emplace(chart, [a, b](const Vec& w) { return a + b * w[1]; }, a - std::abs(b), a + std::abs(b));
    } else if (!parabolic) {
        throw BoundaryError("preset '" + p + "' is defined for the parabolic chart only");
    } else if (p == "bump") {
        g.emplace(chart, [a, b](const Vec& y) { return a + b * std::exp(-y.squaredNorm()); },
                  std::min(a, a + b), std::max(a, a + b));
    } else if (p == "sinc_decay") {
        auto f = [a, b](const Vec& y) { return a + b * std::sin(y[0]) / (1.0 + y.squaredNorm()); };
        // extremes lie on the y_1 axis; |sin y / (1 + y^2)| < 1/401 beyond |y| = 20
        auto g1 = [](double y) { return std::sin(y) / (1.0 + y * y); };
        const double lo = scan_and_refine(g1, -20.0, 20.0, 40001, false);
        const double hi = -scan_and_refine([&](double y) { return -g1(y); }, -20.0, 20.0, 40001, false);
        g.emplace(chart, f, a + std::min(b * lo, b * hi), a + std::max(b * lo, b * hi));
    } else if (p == "step") {
        if (!(width > 0.0)) throw BoundaryError("preset step: width must be positive");
        g.emplace(chart, [a, b, width](const Vec& y) { return a + b * 0.5 * (1.0 + std::tanh(y[0] / width)); },
                  std::min(a, a + b), std::max(a, a + b));
    } else if (p == "linear") {
        const double inf = b == 0.0 ? a : -std::numeric_limits<double>::infinity();
        const double sup = b == 0.0 ? a : std::numeric_limits<double>::infinity();
        g.emplace(chart, [a, b](const Vec& y) { return a + b * y[0]; }, inf, sup);
    } else {
        throw BoundaryError("unknown boundary preset '" + p + "'");
    }
    BoundaryGraph out(g->chart(), [f = *g](const Vec& v) { return f(v); }, g->inf(), g->sup(),
                      BoundaryRepresentation::Preset, p);
    validate_boundary(out);
    return out;
}

BoundaryGraph boundary_from_table(const ChartCase& chart, std::vector<double> sites, std::vector<double> values) {
    if (chart.n != 2) throw BoundaryError("boundary tables support a single ideal coordinate (n = 2)");
    if (sites.size() != values.size() || sites.size() < 2) {
        throw BoundaryError("boundary table: need at least two (site, value) rows");
    }
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (!std::isfinite(sites[i]) || !std::isfinite(values[i])) {
            throw BoundaryError("boundary table: non-finite sample at row " + std::to_string(i + 1));
        }
    }
    sorted_unique_check(sites);
    const bool periodic = chart.kind == ChartKind::Hyperbolic;
    if (periodic && (sites.front() < 0.0 || sites.back() >= kTwoPi)) {
        throw BoundaryError("boundary table: angles must lie in [0, 2 pi)");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double inf = *lo;
    const double sup = *hi;
    auto interp = [sites, values, periodic](double x) {
        const std::size_t m = sites.size();
        if (periodic) {
            x = std::fmod(x, kTwoPi);
            if (x < 0.0) x += kTwoPi;
            if (x < sites.front() || x >= sites.back()) {
                const double span = sites.front() + kTwoPi - sites.back();
                double d = x - sites.back();
                if (d < 0.0) d += kTwoPi;
                return values.back() + (values.front() - values.back()) * d / span;
            }
        } else {
            if (x <= sites.front()) return values.front();
            if (x >= sites.back()) return values.back();
        }
        const auto it = std::upper_bound(sites.begin(), sites.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - sites.begin());
        const std::size_t i = j - 1;
        (void)m;
        const double w = (x - sites[i]) / (sites[j] - sites[i]);
        return values[i] * (1.0 - w) + values[j] * w;
    };
    BoundaryGraph g(
        chart,
        [interp, periodic](const Vec& a) { return interp(periodic ? angle_of(a) : a[0]); }, inf, sup,
        BoundaryRepresentation::Table, "table");
    std::vector<Vec> pts;
    for (double s : sites) {
        if (periodic) {
            pts.push_back(unit_from_angle(s));
        } else {
            pts.push_back(Vec::Constant(1, s));
        }
    }
    g.set_sample_sites(std::move(pts));
    return g;
}

BoundaryGraph read_boundary_table(const ChartCase& chart, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BoundaryError("cannot open boundary table '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw BoundaryError("boundary table '" + path + "' is empty");
    std::vector<double> sites, values;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, extra;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || std::getline(ss, extra, ',')) {
            throw BoundaryError(path + ":" + std::to_string(row) + ": expected two columns");
        }
        try {
            std::size_t pa = 0, pb = 0;
            const double x = std::stod(a, &pa);
            const double v = std::stod(b, &pb);
            sites.push_back(x);
            values.push_back(v);
        } catch (const std::exception&) {
            throw BoundaryError(path + ":" + std::to_string(row) + ": cannot parse number");
        }
    }
    return boundary_from_table(chart, std::move(sites), std::move(values));
}

BoundaryReport validate_boundary(const BoundaryGraph& phi) {
    if (!std::isfinite(phi.inf()) || !std::isfinite(phi.sup())) {
        throw BoundaryValidationError("not between tangent hyperspheres",
                                      "boundary datum '" + phi.name() + "' is unbounded");
    }
    BoundaryReport rep;
    rep.inf = phi.inf();
    rep.sup = phi.sup();
    const auto sites = phi.sample_sites();
    double prev = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const double v = phi(sites[i]);
        if (!std::isfinite(v)) {
            throw BoundaryValidationError("continuity", "non-finite boundary value at sample " + std::to_string(i));
        }
        if (v < phi.inf() - 1e-12 * (1.0 + std::abs(v)) || v > phi.sup() + 1e-12 * (1.0 + std::abs(v))) {
            throw BoundaryValidationError("not between tangent hyperspheres",
                                          "sampled value exceeds the declared bounds");
        }
        if (i > 0) {
            const double d = (sites[i] - sites[i - 1]).norm();
            if (d > 0.0) rep.modulus = std::max(rep.modulus, std::abs(v - prev) / d);
        }
        prev = v;
    }
    return rep;
}

IdealSphere clear_sphere_radius(const BoundaryGraph& gamma, const Vec& center, SphereSide side) {
    const ChartCase& chart = gamma.chart();
    const int n = chart.n;
    if (center.size() != n) throw DomainError("clear_sphere_radius: center must lie in R^n");

    // Signed offset of the center from Gamma along the flow line through it.
    double offset = 0.0;
    Vec foot;
    if (chart.kind == ChartKind::Parabolic) {
        foot = center.tail(n - 1);
        offset = center[0] - gamma(foot);
    } else {
        if (n != 2) throw BoundaryError("clear_sphere_radius: hyperbolic chart supports n = 2 only");
        const double r = center.norm();
        if (r == 0.0) {
            offset = -std::numeric_limits<double>::infinity();
        } else {
            foot = center / r;
            offset = std::log(r) - gamma(foot);
        }
    }
    const double scale = 1.0 + center.norm();
    if (std::abs(offset) <= 1e-14 * scale) {
        throw BoundaryError("clear_sphere_radius: center lies on Gamma (zero radius)");
    }
    if ((side == SphereSide::ContainsM) != (offset < 0.0)) {
        throw BoundaryError("clear_sphere_radius: center is not on the requested side of Gamma");
    }

    auto dist2 = [&](const Vec& arg) { return (gamma.gamma_point(arg) - center).squaredNorm(); };
    double best = std::numeric_limits<double>::infinity();
    if (chart.kind == ChartKind::Hyperbolic) {
        best = scan_and_refine([&](double th) { return dist2(unit_from_angle(th)); }, 0.0, kTwoPi, 8192, true);
    } else if (n == 2) {
        const double reach = std::abs(offset);
        const double y0 = foot[0];
        best = scan_and_refine([&](double y) { return dist2(Vec::Constant(1, y)); }, y0 - reach, y0 + reach, 4001,
                               false);
    } else {
        // lattice scan of the ball |y - y0| <= |offset|, then coordinate descent
        const int dims = n - 1;
        const double reach = std::abs(offset);
        const int per = 41;
        Vec best_y = foot;
        best = dist2(foot);
        std::vector<int> idx(dims, 0);
        while (true) {
            Vec y(dims);
            for (int k = 0; k < dims; ++k) y[k] = foot[k] - reach + 2.0 * reach * idx[k] / (per - 1);
            const double v = dist2(y);
            if (v < best) {
                best = v;
                best_y = y;
            }
            int k = 0;
            while (k < dims && ++idx[k] == per) idx[k++] = 0;
            if (k == dims) break;
        }
        double step = 2.0 * reach / (per - 1);
        for (int sweep = 0; sweep < 60 && step > 1e-14; ++sweep) {
            for (int k = 0; k < dims; ++k) {
                Vec y = best_y;
                auto f1 = [&](double s) {
                    y[k] = s;
                    return dist2(y);
                };
                const auto [s, v] = golden_min(f1, best_y[k] - step, best_y[k] + step, 1e-15);
                if (v < best) {
                    best = v;
                    best_y[k] = s;
                }
            }
            step *= 0.5;
        }
    }
    if (!std::isfinite(best)) throw BoundaryError("clear_sphere_radius: minimization did not converge");
    return IdealSphere{center, std::sqrt(best)};
}

double brute_force_distance(const BoundaryGraph& gamma, const Vec& center, int samples, double window) {
    const ChartCase& chart = gamma.chart();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        Vec arg;
        if (chart.kind == ChartKind::Hyperbolic) {
            arg = unit_from_angle(kTwoPi * i / samples);
        } else {
            arg = Vec::Constant(1, center[1] - window + 2.0 * window * i / (samples - 1));
        }
        best = std::min(best, (gamma.gamma_point(arg) - center).squaredNorm());
    }
    return std::sqrt(best);
}

}  // namespace hypcmc
