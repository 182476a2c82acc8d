#include "hypcmc/graph_ops.hpp"

#include "hypcmc/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace hypcmc {

EmbeddedMesh embed_graph(const GraphFunction& u, const KillingFieldSpec& field) {
    if (!u.grid) throw DomainError("embed_graph: graph function has no grid");
    const ChartGrid& g = *u.grid;
    const KillingFieldSpec expected = g.chart().field();
    if (expected.kind != field.kind || expected.n != field.n) {
        throw DomainError("embed_graph: Killing field does not match the chart");
    }
    EmbeddedMesh m;
    m.grid = u.grid;
    m.field = field;
    m.vertex_of_node.assign(g.size(), -1);
    for (std::size_t node = 0; node < g.size(); ++node) {
        if (g.kind(node) == NodeKind::Inactive) continue;
        const Vec xi = g.coords(node);
        if (!g.chart().contains(xi)) continue;
        m.vertex_of_node[node] = static_cast<long>(m.vertices.size());
        m.node_of_vertex.push_back(node);
        m.vertices.push_back(killing_flow(field, u[node], chart_embed(g.chart(), xi)));
    }
    if (g.dim() == 2) {
        const int nx = g.counts()[0];
        const int ny = g.counts()[1];
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i + 1 < nx; ++i) {
                const std::size_t a = static_cast<std::size_t>(j) * nx + i;
                const long va = m.vertex_of_node[a];
                const long vb = m.vertex_of_node[a + 1];
                const long vc = m.vertex_of_node[a + nx + 1];
                const long vd = m.vertex_of_node[a + nx];
                if (va < 0 || vb < 0 || vc < 0 || vd < 0) continue;
                m.triangles.push_back({static_cast<std::size_t>(va), static_cast<std::size_t>(vb),
                                       static_cast<std::size_t>(vc)});
                m.triangles.push_back({static_cast<std::size_t>(va), static_cast<std::size_t>(vc),
                                       static_cast<std::size_t>(vd)});
            }
        }
    }

    // normals from centred differences where available, one-sided otherwise
    const int n = g.dim();
    m.normals.resize(m.vertices.size());
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
        const std::size_t node = m.node_of_vertex[v];
        const auto idx = g.multi_index(node);
        Mat tangents(n, n + 1);
        for (int a = 0; a < n; ++a) {
            auto neighbour = [&](int step) -> long {
                auto j = idx;
                j[a] += step;
                if (j[a] < 0 || j[a] >= g.counts()[a]) return -1;
                return m.vertex_of_node[g.node_at(j)];
            };
            const long up = neighbour(1);
            const long down = neighbour(-1);
            const Vec& here = m.vertices[v].coords();
            const Vec hi = up >= 0 ? m.vertices[static_cast<std::size_t>(up)].coords() : here;
            const Vec lo = down >= 0 ? m.vertices[static_cast<std::size_t>(down)].coords() : here;
            tangents.row(a) = (hi - lo).transpose();
        }
        Eigen::JacobiSVD<Mat> svd(tangents, Eigen::ComputeFullV);
        Vec nu = svd.matrixV().col(n);
        if (nu.dot(killing_eval(field, m.vertices[v]).components) > 0.0) nu = -nu;
        m.normals[v] = nu;
    }
    return m;
}

double CurvatureField::max_deviation(double h) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (valid[i]) worst = std::max(worst, std::abs(values[i] - h));
    }
    return worst;
}

namespace {

int ipow(int b, int e) {
    int p = 1;
    for (int i = 0; i < e; ++i) p *= b;
    return p;
}

}  // namespace

CurvatureField numeric_mean_curvature(const EmbeddedMesh& mesh) {
    const ChartGrid& g = *mesh.grid;
    const int n = g.dim();
    const int d = n + 1;
    const int points = ipow(5, n);
    const int terms = 1 + n + n * (n + 1) / 2;

    // least-squares projector of the quadratic fit, shared by every vertex
    Mat design(points, terms);
    std::vector<std::vector<int>> offsets(points, std::vector<int>(n));
    for (int k = 0; k < points; ++k) {
        int code = k;
        for (int a = 0; a < n; ++a) {
            offsets[k][a] = code % 5 - 2;
            code /= 5;
        }
        int col = 0;
        design(k, col++) = 1.0;
        for (int a = 0; a < n; ++a) design(k, col++) = offsets[k][a] * g.spacing(a);
        for (int a = 0; a < n; ++a) {
            for (int b = a; b < n; ++b) {
                design(k, col++) = offsets[k][a] * g.spacing(a) * offsets[k][b] * g.spacing(b);
            }
        }
    }
    const Mat projector = design.colPivHouseholderQr().solve(Mat::Identity(points, points));

    CurvatureField f;
    f.values.assign(mesh.vertices.size(), std::numeric_limits<double>::quiet_NaN());
    f.valid.assign(mesh.vertices.size(), false);
    std::vector<char> ok(mesh.vertices.size(), 0);
    parallel_chunks(mesh.vertices.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
        Mat samples(points, d);
        for (std::size_t v = begin; v < end; ++v) {
            const auto idx = g.multi_index(mesh.node_of_vertex[v]);
            bool full = true;
            for (int k = 0; k < points && full; ++k) {
                auto j = idx;
                for (int a = 0; a < n; ++a) {
                    j[a] += offsets[k][a];
                    if (j[a] < 0 || j[a] >= g.counts()[a]) full = false;
                }
                if (!full) break;
                const long w = mesh.vertex_of_node[g.node_at(j)];
                if (w < 0) {
                    full = false;
                    break;
                }
                samples.row(k) = mesh.vertices[static_cast<std::size_t>(w)].coords().transpose();
            }
            if (!full) continue;
            const Mat coef = projector * samples;  // terms x d
            Mat tangents(n, d);
            for (int a = 0; a < n; ++a) tangents.row(a) = coef.row(1 + a);
            std::vector<Vec> second(n * n);
            int col = 1 + n;
            for (int a = 0; a < n; ++a) {
                for (int b = a; b < n; ++b) {
                    const Vec c = coef.row(col++).transpose();
                    second[a * n + b] = a == b ? Vec(2.0 * c) : c;
                    second[b * n + a] = second[a * n + b];
                }
            }
            Eigen::JacobiSVD<Mat> svd(tangents, Eigen::ComputeFullV);
            if (svd.singularValues()[n - 1] < 1e-12 * svd.singularValues()[0]) continue;
            Vec nu = svd.matrixV().col(n);
            const HalfSpacePoint& x = mesh.vertices[v];
            if (nu.dot(killing_eval(mesh.field, x).components) > 0.0) nu = -nu;
            const Mat first = tangents * tangents.transpose();
            Mat two(n, n);
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) two(a, b) = second[a * n + b].dot(nu);
            }
            const double h_euc = first.ldlt().solve(two).trace() / n;
            f.values[v] = x.height() * h_euc + nu[n];
            ok[v] = 1;
        }
    });
    for (std::size_t v = 0; v < ok.size(); ++v) f.valid[v] = ok[v] != 0;
    return f;
}

CurvatureField restrict_to_interior(const EmbeddedMesh& mesh, const CurvatureField& field, double margin,
                                    bool artificial_only) {
    const ChartGrid& g = *mesh.grid;
    std::vector<Vec> edge;
    for (std::size_t node = 0; node < g.size(); ++node) {
        if (g.kind(node) != NodeKind::Boundary) continue;
        if (artificial_only && g.tag(node) != EdgeTag::Artificial) continue;
        edge.push_back(g.coords(node));
    }
    CurvatureField out = field;
    const double m2 = margin * margin;
    for (std::size_t v = 0; v < out.values.size(); ++v) {
        if (!out.valid[v]) continue;
        const Vec xi = g.coords(mesh.node_of_vertex[v]);
        for (const Vec& b : edge) {
            if ((b - xi).squaredNorm() < m2) {
                out.valid[v] = false;
                out.values[v] = std::numeric_limits<double>::quiet_NaN();
                break;
            }
        }
    }
    return out;
}

CurvatureField oracle_interior(const EmbeddedMesh& mesh, const CurvatureField& field) {
    if (mesh.grid->chart().kind == ChartKind::Parabolic) return restrict_to_interior(mesh, field, 0.25, true);
    return restrict_to_interior(mesh, field, 0.125, false);
}

TraceReport boundary_trace(const Solution& u, const BoundaryGraph& phi, const std::vector<Vec>& probes, double eps) {
    const ChartGrid& g = *u.u.grid;
    const ChartCase& chart = g.chart();
    const int n = chart.n;
    if (!(eps > 0.0)) throw DomainError("boundary_trace: eps must be positive");
    // Lagrange weights at 0 for samples at eps, 2 eps, 4 eps
    constexpr double w1 = 8.0 / 3.0, w2 = -2.0, w4 = 1.0 / 3.0;
    TraceReport r;
    for (const Vec& p : probes) {
        std::array<double, 3> vals{};
        const std::array<double, 3> dist{eps, 2.0 * eps, 4.0 * eps};
        for (int k = 0; k < 3; ++k) {
            Vec xi;
            if (chart.kind == ChartKind::Parabolic) {
                xi = p;
                xi[n - 1] = dist[k];
                if (dist[k] > g.hi()[n - 1] + 1e-12) throw DomainError("boundary_trace: too few layers above the ideal edge");
            } else {
                if (dist[k] >= 1.0) throw DomainError("boundary_trace: too few layers inside the ideal edge");
                xi = (1.0 - dist[k]) * p;
            }
            const auto v = interpolate(u.u, xi);
            if (v) {
                vals[k] = *v;
            } else if (k == 0) {
                vals[k] = phi.at_chart_point(xi);
            } else {
                std::ostringstream os;
                os << "boundary_trace: no grid layer at (" << xi.transpose() << ")";
                throw DomainError(os.str());
            }
        }
        const double limit = w1 * vals[0] + w2 * vals[1] + w4 * vals[2];
        const double err = std::abs(limit - phi.at_chart_point(p));
        r.probes.push_back(p);
        r.limits.push_back(limit);
        r.errors.push_back(err);
        r.max_error = std::max(r.max_error, err);
    }
    return r;
}

std::vector<Vec> default_probes(const ChartCase& chart, int count, double half_width) {
    std::vector<Vec> probes;
    const int n = chart.n;
    for (int k = 0; k < count; ++k) {
        Vec p = Vec::Zero(n);
        if (chart.kind == ChartKind::Parabolic) {
            p[0] = count == 1 ? 0.0 : -half_width + 2.0 * half_width * k / (count - 1);
        } else {
            const double a = 2.0 * std::numbers::pi * k / count;
            p[0] = std::cos(a);
            p[1] = std::sin(a);
        }
        probes.push_back(p);
    }
    return probes;
}

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

OracleCase planar_case(std::string name, const ModelSurface& m) {
    const ChartCase p{ChartKind::Parabolic, 2};
    return {std::move(name), SurfaceGraph(m, p, Sheet::Far), vec2(-1.0, 0.2), vec2(1.0, 1.2)};
}

OracleCase cap_case(std::string name, const ModelSurface& m) {
    const ChartCase p{ChartKind::Parabolic, 2};
    return {std::move(name), SurfaceGraph(m, p, Sheet::Far), vec2(-0.5, 0.2), vec2(0.5, 0.7)};
}

OracleCase disk_case(std::string name, const ModelSurface& m) {
    const ChartCase y{ChartKind::Hyperbolic, 2};
    return {std::move(name), SurfaceGraph(m, y, Sheet::Far), vec2(-0.5, -0.5), vec2(0.5, 0.5)};
}

OracleCase sphere_case(std::string name, double height, double radius) {
    const ChartCase p{ChartKind::Parabolic, 2};
    Vec c(3);
    c << 0.0, 0.0, height;
    const double a = 0.5 * radius;
    return {std::move(name), SurfaceGraph(ModelSurface::sphere(c, radius), p, Sheet::Far), vec2(-a, height - a),
            vec2(a, height + a)};
}

}  // namespace

std::vector<OracleCase> model_surface_cases() {
    const Vec o = Vec::Zero(2);
    const double pi = std::numbers::pi;
    return {
        planar_case("vertical_plane", ModelSurface::vertical_plane(0.7)),
        planar_case("tilted_plane_m0.25", ModelSurface::tilted_plane(0.7, 0.25)),
        planar_case("tilted_plane_m0.75", ModelSurface::tilted_plane(0.7, 0.75)),
        planar_case("tilted_plane_m2", ModelSurface::tilted_plane(0.7, 2.0)),
        planar_case("hemisphere", ModelSurface::hemisphere(o, 3.0)),
        planar_case("cap_pi/3", ModelSurface::spherical_cap(o, 3.0, pi / 3)),
        planar_case("cap_2pi/3", ModelSurface::spherical_cap(o, 3.0, 2 * pi / 3)),
        disk_case("horosphere", ModelSurface::horosphere(2.0)),
        disk_case("hemisphere_disk", ModelSurface::hemisphere(o, 2.0)),
        sphere_case("geodesic_sphere", 2.0, 1.0),
    };
}

std::vector<OracleCase> random_model_surfaces(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    const double pi = std::numbers::pi;
    std::vector<OracleCase> out;
    for (int k = 0; k < count; ++k) {
        const std::string tag = "#" + std::to_string(k);
        switch (k % 6) {
            case 0:
                out.push_back(planar_case("vertical_plane" + tag, ModelSurface::vertical_plane(uniform(-1.0, 1.0))));
                break;
            case 1:
                out.push_back(planar_case("tilted_plane" + tag,
                                          ModelSurface::tilted_plane(uniform(-1.0, 1.0), uniform(-2.0, 2.0))));
                break;
            case 2:
                out.push_back(cap_case("hemisphere" + tag, ModelSurface::hemisphere(vec2(0.0, uniform(-0.2, 0.2)),
                                                                                    uniform(2.5, 4.0))));
                break;
            case 3:
                out.push_back(cap_case("cap" + tag, ModelSurface::spherical_cap(vec2(0.0, uniform(-0.2, 0.2)),
                                                                               uniform(2.5, 4.0),
                                                                               uniform(pi / 4, 3 * pi / 4))));
                break;
            case 4:
                out.push_back(disk_case("horosphere" + tag, ModelSurface::horosphere(uniform(0.5, 3.0))));
                break;
            default:
                out.push_back(sphere_case("sphere" + tag, uniform(1.5, 2.5), uniform(0.8, 1.2)));
                break;
        }
    }
    return out;
}

OracleRow run_oracle_case(const OracleCase& c, double spacing, double inset) {
    const ChartCase& chart = c.graph.chart();
    std::vector<int> counts(chart.n);
    for (int a = 0; a < chart.n; ++a) counts[a] = static_cast<int>(std::lround((c.hi[a] - c.lo[a]) / spacing)) + 1;
    const auto grid = std::make_shared<const ChartGrid>(ChartGrid::box(chart, c.lo, c.hi, counts));
    const EmbeddedMesh mesh = embed_graph(sample_graph(c.graph, grid), chart.field());
    CurvatureField f = numeric_mean_curvature(mesh);
    if (inset > 0.0) f = restrict_to_interior(mesh, f, inset);
    OracleRow r;
    r.name = c.name;
    r.spacing = spacing;
    r.exact = exact_mean_curvature(c.graph.surface());
    for (std::size_t v = 0; v < f.values.size(); ++v) {
        if (!f.valid[v]) continue;
        const Vec ref = reference_normal(c.graph.surface(), mesh.vertices[v].coords());
        const double value = ref.dot(mesh.normals[v]) >= 0.0 ? f.values[v] : -f.values[v];
        r.max_deviation = std::max(r.max_deviation, std::abs(value - r.exact));
        ++r.vertices;
    }
    return r;
}

}  // namespace hypcmc
