#pragma once

// The ideal boundary datum Gamma, given as a Killing graph phi over the ideal
// boundary of M.  Parabolic chart: phi(y), y in R^{n-1}, Gamma = {(phi(y), y)}.
// Hyperbolic chart: phi(omega), omega in S^{n-1}, Gamma = {e^{phi(omega)} omega}.

#include "hypcmc/geometry.hpp"
#include "hypcmc/model_surfaces.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypcmc {

class BoundaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by validate_boundary; `hypothesis` names the failed condition.
class BoundaryValidationError : public BoundaryError {
public:
    BoundaryValidationError(std::string hypothesis, const std::string& detail)
        : BoundaryError(hypothesis + ": " + detail), hypothesis_(std::move(hypothesis)) {}
    const std::string& hypothesis() const { return hypothesis_; }

private:
    std::string hypothesis_;
};

enum class BoundaryRepresentation { Preset, Table };

struct BoundarySpec {
    std::string preset;                   // constant, bump, sinc_decay, step, angular_sine, linear
    std::map<std::string, double> params; // a, b, width
    std::string table_path;               // used when preset is empty
};

class BoundaryGraph {
public:
    using Function = std::function<double(const Vec&)>;

    BoundaryGraph(ChartCase chart, Function phi, double inf, double sup,
                  BoundaryRepresentation rep = BoundaryRepresentation::Preset, std::string name = "custom");

    const ChartCase& chart() const { return chart_; }
    /// Parabolic: argument is y in R^{n-1}.  Hyperbolic: unit vector in R^n.
    double operator()(const Vec& arg) const { return phi_(arg); }
    /// phi at an ideal chart point: parabolic (y, t) reads y, hyperbolic xi reads xi/|xi|.
    double at_chart_point(const Vec& xi) const;
    double inf() const { return inf_; }
    double sup() const { return sup_; }
    BoundaryRepresentation representation() const { return rep_; }
    const std::string& name() const { return name_; }

    /// Sample sites used for validation (table nodes, or a dense preset window).
    std::vector<Vec> sample_sites() const;
    void set_sample_sites(std::vector<Vec> sites) { sites_ = std::move(sites); }

    /// Point of Gamma in the ideal boundary R^n over the ideal coordinate `arg`.
    Vec gamma_point(const Vec& arg) const;

    BoundaryGraph shifted(double delta) const;
    BoundaryGraph negated() const;

private:
    ChartCase chart_;
    Function phi_;
    double inf_;
    double sup_;
    BoundaryRepresentation rep_;
    std::string name_;
    std::vector<Vec> sites_;
};

BoundaryGraph make_boundary_graph(const ChartCase& chart, const BoundarySpec& spec);

/// Piecewise-linear table, constant extension outside the sample range.  One
/// ideal coordinate only (n = 2): y for the parabolic chart, the angle theta
/// (periodic) for the hyperbolic chart.
BoundaryGraph boundary_from_table(const ChartCase& chart, std::vector<double> sites, std::vector<double> values);

/// CSV with a header row and columns (y or theta, phi).
BoundaryGraph read_boundary_table(const ChartCase& chart, const std::string& path);

struct BoundaryReport {
    double inf = 0.0;
    double sup = 0.0;
    double modulus = 0.0;  // max sampled difference quotient
};

BoundaryReport validate_boundary(const BoundaryGraph& phi);

enum class SphereSide { ContainsM, OppositeM };

/// Largest ideal sphere about `center` (a point of R^n) lying on the requested
/// side of Gamma.  The radius is the Euclidean distance from center to Gamma.
IdealSphere clear_sphere_radius(const BoundaryGraph& gamma, const Vec& center, SphereSide side);

/// Same minimization by exhaustive sampling; test oracle only.
double brute_force_distance(const BoundaryGraph& gamma, const Vec& center, int samples, double window);

}  // namespace hypcmc
