#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "elastica/extensible.hpp"
#include "elastica/geometry.hpp"

namespace elastica {

// 4 sqrt2 (sin^2(theta0/4) + sin^2(theta1/4)): small-eps slope of the minimizer length
double length_coefficient(double theta0, double theta1);

struct LengthSample {
    double length = 0.0;
    std::vector<double> tie_lengths;  // distinct lengths among energy ties, if any
    SolveResult solve;
};

LengthSample length_of_min(const BoundaryCondition& bc, double eps, const SolveOptions& opts = {});

struct LengthRow {
    double eps = 0.0;
    double length = 0.0;
    double energy = 0.0;
    DiscreteCurve curve;
};

// Rows kept sorted by eps.
struct LengthTable {
    std::vector<LengthRow> rows;

    void insert(LengthRow row);
    // indices i with rows[i].length > rows[i+1].length + tol
    std::vector<std::size_t> violations(double tol = 1e-8) const;
    bool monotone(double tol = 1e-8) const { return violations(tol).empty(); }
};

LengthTable build_length_table(const BoundaryCondition& bc, const std::vector<double>& eps_values,
                               const SolveOptions& opts = {});

struct InextensibleResult {
    double eps_tilde = 0.0;
    DiscreteCurve curve;
    MinimizerCertificate cert;
    bool attained = true;
    // final bracket; when the length is not attained these are the nearest pair
    double eps_lo = 0.0;
    double eps_hi = 0.0;
    double length_lo = 0.0;
    double length_hi = 0.0;
    int evaluations = 0;
};

InextensibleResult solve_inextensible(double L, const BoundaryCondition& bc, double tol = 1e-10,
                                      const SolveOptions& opts = {});

DiscreteCurve dilate(const DiscreteCurve& curve, double factor);

struct SweepRow {
    double l = 0.0;
    double eps_tilde = 0.0;
    double ratio = 0.0;   // (L - l) / eps_tilde
    double energy = 0.0;  // bending energy of the fixed-length curve
    int inflections = 0;
    bool self_intersections = false;
    bool attained = true;
    DiscreteCurve curve;
};

// threads = 0 uses the hardware concurrency.
std::vector<SweepRow> straightening_sweep(double L, double theta0, double theta1, const std::vector<double>& l_values,
                                          const SolveOptions& opts = {}, double tol = 1e-10, unsigned threads = 1);

std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace elastica
