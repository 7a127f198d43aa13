#include "elastica/borderline.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace elastica {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

// tan(phi/4) along the layer.
double quarter_tan(const BorderlineSpec& spec, double s) {
    return std::exp(-(s + spec.shift) / kSqrt2);
}
} // namespace

double shift_for_angle(double theta) {
    const double a = std::abs(theta);
    if (!(a > 0.0) || a > kPi)
        throw std::domain_error("borderline layer needs 0 < |theta| <= pi");
    if (a == kPi)
        return 0.0;
    return -kSqrt2 * std::log(std::tan(0.25 * a));
}

BorderlineSpec make_borderline(double theta) {
    return {theta, shift_for_angle(theta), theta > 0.0 ? 1.0 : -1.0};
}

double borderline_angle(const BorderlineSpec& spec, double s) {
    if (s == 0.0)
        return spec.theta;
    return spec.sign * 4.0 * std::atan(quarter_tan(spec, s));
}

double borderline_curvature(const BorderlineSpec& spec, double s) {
    return -spec.sign * kSqrt2 / std::cosh((s + spec.shift) / kSqrt2);
}

Point borderline_point(const BorderlineSpec& spec, double s) {
    // With u = (s + shift)/sqrt2: cos(phi) = 1 - 2 sech^2 u, sin(phi) = 2 sech u tanh u.
    const double u = (s + spec.shift) / kSqrt2;
    const double u0 = spec.shift / kSqrt2;
    const double x = s - 2.0 * kSqrt2 * (std::tanh(u) - std::tanh(u0));
    const double y = -2.0 * kSqrt2 * (1.0 / std::cosh(u) - 1.0 / std::cosh(u0));
    return {x, spec.sign * y};
}

double borderline_energy(const BorderlineSpec& spec, double s0, double s1) {
    if (!(s0 >= 0.0) || s1 < s0)
        throw std::invalid_argument("borderline_energy needs 0 <= s0 <= s1");
    // V(phi) = 8 sqrt2 sin^2(phi/4) = 8 sqrt2 t^2/(1+t^2) with t = tan(phi/4).
    auto v = [&](double s) {
        if (std::isinf(s))
            return 0.0;
        const double t = quarter_tan(spec, s);
        return 8.0 * kSqrt2 * t * t / (1.0 + t * t);
    };
    return std::abs(v(s0) - v(s1));
}

DiscreteCurve sample_borderline(const BorderlineSpec& spec, double window, std::size_t N) {
    DiscreteCurve c;
    c.length = window;
    c.theta.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i)
        c.theta[i] = borderline_angle(spec, window * static_cast<double>(i) / static_cast<double>(N));
    return c;
}

} // namespace elastica
