#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "elastica/geometry.hpp"
#include "json.hpp"

namespace elastica {

struct SolveOptions {
    std::size_t N = 4096;
    double endpoint_tol = 1e-10;
    double grad_tol = 1e-8;
    int max_iter = 4000;  // inner quasi-Newton iterations per penalty round
    std::vector<int> classes{-1, 0, 1};
    bool reflections = true;
    double penalty0 = 10.0;
    double penalty_factor = 10.0;
    int max_rounds = 8;
    int newton_iters = 40;
    int lbfgs_memory = 12;
    unsigned seed = 0;
    double jitter = 0.0;  // amplitude of seeded random perturbation of interior start angles

    void validate() const;
};

struct StartSummary {
    std::string label;
    int winding = 0;
    double e_eps = 0.0;
    double length = 0.0;
    double stationarity = 0.0;
    double endpoint_residual = 0.0;
    bool converged = false;
};

struct MinimizerCertificate {
    EnergyReport energy;
    double eps = 0.0;
    double endpoint_residual = 0.0;
    double stationarity = 0.0;
    double elastica_residual = 0.0;           // max |eps^2(2k'' + k^3) - k|
    double elastica_residual_rescaled = 0.0;  // same in units k_hat = eps * k
    double lambda_x = 0.0;
    double lambda_y = 0.0;
    int winding = 0;
    bool is_global = false;
    bool converged = false;
    std::string start;
    std::vector<StartSummary> starts;
    std::vector<std::string> ties;  // distinct curves within 1e-10 of the best energy
    std::vector<double> tie_lengths;
    // winding classes outside the searched set whose energy lower bound
    // l + eps |V(theta1 + 2 pi m) - V(theta0)| is below the result; nonempty means the
    // class set should be widened
    std::vector<int> unexcluded_classes;
};

struct SolveResult {
    DiscreteCurve curve;
    MinimizerCertificate cert;
};

DiscreteCurve build_test_curve(const BoundaryCondition& bc, double eps, double alpha,
                               std::size_t N = 4096);

SolveResult minimize_extensible(const BoundaryCondition& bc, double eps, const SolveOptions& opts = {});
SolveResult minimize_in_winding_class(const BoundaryCondition& bc, double eps, int m,
                                      const SolveOptions& opts = {});
// Local solve in the class fixed by the initial curve's final angle.
SolveResult minimize_from(const BoundaryCondition& bc, double eps, const DiscreteCurve& start,
                          const SolveOptions& opts = {});

double elastica_residual(const DiscreteCurve& curve, double eps);

// Stationarity of the discrete Lagrangian: returns max(|grad_theta|/h, |d/dL|) at the
// least-squares multipliers.
double stationarity_residual(const DiscreteCurve& curve, const BoundaryCondition& bc, double eps);

// The optimizer's discrete augmented Lagrangian over z = (theta_1..theta_{N-1}, L), N = z.size(),
// with theta_0 = bc.theta0 and theta_N = bc.theta1. Exposed for gradient checks.
double discrete_augmented_lagrangian(const BoundaryCondition& bc, double eps, const std::vector<double>& z, double lx,
                                     double ly, double mu, std::vector<double>& grad);

nlohmann::json to_json(const MinimizerCertificate& cert);

} // namespace elastica
