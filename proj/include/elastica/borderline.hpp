#pragma once

#include <cstddef>

#include "elastica/geometry.hpp"

namespace elastica {

// Transition layer from angle theta (0 < |theta| <= pi) down to 0, in rescaled units.
struct BorderlineSpec {
    double theta = 0.0;
    double shift = 0.0;
    double sign = 1.0;
};

double shift_for_angle(double theta);
BorderlineSpec make_borderline(double theta);

double borderline_angle(const BorderlineSpec& spec, double s);
double borderline_curvature(const BorderlineSpec& spec, double s);
Point borderline_point(const BorderlineSpec& spec, double s);
double borderline_energy(const BorderlineSpec& spec, double s0, double s1);

// Uniform samples of the layer on [0, window].
DiscreteCurve sample_borderline(const BorderlineSpec& spec, double window, std::size_t N);

} // namespace elastica
