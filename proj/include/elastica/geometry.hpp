#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace elastica {

using Point = std::array<double, 2>;

// Clamped data: the curve runs from (0,0) to (l,0) with initial angle theta0
// and final angle theta1.
struct BoundaryCondition {
    double l = 1.0;
    double theta0 = 0.0;
    double theta1 = 0.0;

    void validate() const;
    BoundaryCondition reflected() const { return {l, -theta0, -theta1}; }
};

// Constant-speed curve sampled at s_i = i * length / N, i = 0..N.
// Angles are an unwrapped (continuous) representative.
struct DiscreteCurve {
    double length = 1.0;
    std::vector<double> theta;

    std::size_t intervals() const { return theta.empty() ? 0 : theta.size() - 1; }
    double step() const { return length / static_cast<double>(intervals()); }
    void validate() const;
    // True when consecutive samples jump by pi or more.
    bool has_angle_jumps() const;
};

struct EnergyReport {
    double bending = 0.0;
    double length = 0.0;
    double e_eps = 0.0;
    double f_eps = 0.0;
};

DiscreteCurve straight_segment(double l, std::size_t N);

// Nodal curvature: central differences, one-sided second order at both ends.
std::vector<double> curvature(const DiscreteCurve& curve);
// Nodal derivative of samples g on a grid of spacing h, same stencils.
std::vector<double> differentiate(const std::vector<double>& g, double h);

std::vector<Point> reconstruct_positions(const DiscreteCurve& curve);
Point endpoint(const DiscreteCurve& curve);

EnergyReport energies(const DiscreteCurve& curve, double eps);

// Trapezoid F_eps over nodes [i0, i1] using the whole-curve nodal curvature.
double f_eps_range(const DiscreteCurve& curve, const std::vector<double>& kappa, double eps,
                   std::size_t i0, std::size_t i1);

double weighted_variation(double theta);

// Reduction to [-pi, pi); never applied to stored angles.
double reduce_angle(double theta);

int winding_number(const DiscreteCurve& curve, const BoundaryCondition& bc);

// Resamples the initial window [0, c*eps] and blows it up by 1/eps.
DiscreteCurve rescale(const DiscreteCurve& curve, double eps, double c);

// Linear interpolation of theta at arc length s.
double angle_at(const DiscreteCurve& curve, double s);

nlohmann::json to_json(const DiscreteCurve& curve);
DiscreteCurve curve_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EnergyReport& e);
nlohmann::json to_json(const BoundaryCondition& bc);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

} // namespace elastica
