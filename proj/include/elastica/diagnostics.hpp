#pragma once

#include <string>
#include <vector>

#include "elastica/geometry.hpp"
#include "json.hpp"

namespace elastica {

enum class Family { Cn, Dn, Line };
std::string family_name(Family f);

// Curvature kappa(s) = A * fn(alpha * s + beta, k), fn = cn or dn.
struct ElasticaFit {
    Family family = Family::Line;
    double A = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double k = 0.0;
    double kc = 1.0;  // complementary modulus, kept separately for k close to 1
    double eps = 0.0;
    double residual = 0.0;  // max nodal |kappa - model|
    bool ok = false;        // residual <= threshold * max|kappa|
};

double fit_curvature(const ElasticaFit& fit, double s);
ElasticaFit classify_elastica(const DiscreteCurve& curve, double eps, double threshold = 1e-2);

// tol <= 0 selects 1e-4 * max|kappa|.
int count_inflections(const DiscreteCurve& curve, double tol = 0.0);
bool has_self_intersection(const DiscreteCurve& curve);
double straightness_profile(const DiscreteCurve& curve, double eps, double c);
double total_angle_variation(const DiscreteCurve& curve);

struct RescaledDeviation {
    double c0 = 0.0;  // sup |theta_hat - borderline angle| on [0, c]
    double c1 = 0.0;  // sup |kappa_hat - borderline curvature| on [0, c]
};
RescaledDeviation rescaled_deviation(const DiscreteCurve& curve, double eps, double theta0, double c);

// Graph y = u(x) sampled on a uniform grid over [-R - r, R + r].
struct GraphSamples {
    double R = 0.0;
    double r = 0.0;
    std::vector<double> x;
    std::vector<double> u;
};

// Two-inflection graph piece cut from an inflectional elastica of modulus k:
// kappa = -2k cn(s), theta = -2 asin(k sn(s)), inflections at s = +-K, domain up to s = 1.5K.
GraphSamples synth_inflection_graph(double k, std::size_t n);

double graph_energy(const std::vector<double>& x, const std::vector<double>& u, double eps);

struct SShapeResult {
    std::vector<double> u_delta;
    double energy_before = 0.0;
    double energy_after = 0.0;
    double shift = 0.0;  // U - U_delta on the middle part
};

SShapeResult sshape_perturb(const GraphSamples& g, double delta, double eps);

nlohmann::json to_json(const ElasticaFit& f);
// Diagnostic record keyed by (bc, eps).
nlohmann::json diagnostics_report(const DiscreteCurve& curve, const BoundaryCondition& bc, double eps,
                                  const std::vector<double>& c_values);

} // namespace elastica
