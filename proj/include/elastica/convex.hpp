#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

#include "elastica/geometry.hpp"
#include "json.hpp"

namespace elastica {

// Tangential-angle nodes phi(u) on a uniform u grid: either phi = lo + u (uniform) or
// phi = center + scale * sinh(u) (clustered around center).
struct AngleGrid {
    bool graded = false;
    double center = 0.0;
    double scale = 1.0;
    double u0 = 0.0;
    double du = 0.0;
    std::size_t M = 0;

    double u(std::size_t i) const { return u0 + du * static_cast<double>(i); }
    double phi_of_u(double u) const;
    double dphi_du(double u) const;
};

// Radius of curvature rho(phi) on [min(theta0,theta1), max(theta0,theta1)].
struct RhoProfile {
    double theta0 = 0.0;
    double theta1 = 0.0;
    double eps = 0.0;
    double l = 0.0;
    // stationary form rho = eps / sqrt(1 + a cos(phi) + b sin(phi)); the radicand equals
    // mu + 2 (1 - mu) sin^2((phi - psi)/2)
    double a = 0.0;
    double b = 0.0;
    double mu = 1.0;
    double psi = 0.0;
    AngleGrid grid;
    std::vector<double> phi;
    std::vector<double> rho;
    std::vector<double> weight;  // quadrature weights for d(phi)
    int newton_steps = 0;

    double lo() const { return std::min(theta0, theta1); }
    double hi() const { return std::max(theta0, theta1); }
};

struct ConvexOptions {
    std::size_t M = 4096;
    double a0 = 0.0;  // Newton start, in (a, b) form
    double b0 = 0.0;
    int max_steps = 100;
    double tol = 1e-13;
};

RhoProfile solve_convex(const BoundaryCondition& bc, double eps, const ConvexOptions& opts = {});

// Profile from samples on a uniform phi grid (theta0 -> theta1 direction is implied).
RhoProfile make_rho_profile(double theta0, double theta1, double eps, const std::vector<double>& rho_uniform);

// Stationary form evaluated at an arbitrary angle.
double rho_at(const RhoProfile& p, double phi);

double convex_energy(const RhoProfile& p);
// (int rho cos(phi) dphi, int rho sin(phi) dphi)
std::array<double, 2> convex_displacement(const RhoProfile& p);
// Same functional for externally supplied samples on the profile's nodes.
double convex_energy(const RhoProfile& p, const std::vector<double>& rho);

DiscreteCurve rho_to_curve(const RhoProfile& p, std::size_t N);

nlohmann::json to_json(const RhoProfile& p);

} // namespace elastica
