#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "elastica/borderline.hpp"
#include "elastica/geometry.hpp"
#include "oracle.hpp"

using namespace elastica;
namespace {
constexpr double pi = std::numbers::pi;
constexpr double s2 = std::numbers::sqrt2;
}

TEST_CASE("shift for angle") {
    CHECK(shift_for_angle(pi) == 0.0);
    const long double ref = oracle::bisect(
        [](long double s) { return 4.0L * std::atan(std::exp(-s / std::sqrt(2.0L))) - std::acos(-1.0L) / 2; }, 0.0L,
        10.0L);
    CHECK(std::abs(shift_for_angle(pi / 2) - static_cast<double>(ref)) <= 1e-13);
    CHECK(shift_for_angle(pi / 2) == doctest::Approx(s2 * std::log(1 + s2)).epsilon(1e-14));
    CHECK(shift_for_angle(0.01) > 7.0);
    CHECK(shift_for_angle(-pi / 2) == shift_for_angle(pi / 2));
    CHECK_THROWS_AS(shift_for_angle(0.0), std::domain_error);
    CHECK_THROWS_AS(shift_for_angle(4.0), std::domain_error);
}

TEST_CASE("angle and curvature values") {
    const auto P = make_borderline(pi), H = make_borderline(pi / 2);
    CHECK(borderline_angle(P, 0.0) == doctest::Approx(pi).epsilon(1e-15));
    CHECK(borderline_angle(H, 0.0) == doctest::Approx(pi / 2).epsilon(1e-15));
    CHECK(borderline_curvature(H, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(borderline_curvature(P, 0.0) == doctest::Approx(-s2).epsilon(1e-15));
    CHECK(borderline_angle(P, 20.0) < 1e-5);
    CHECK(std::abs(borderline_curvature(P, 200.0)) < 1e-40);
    const auto N = make_borderline(-pi / 2);
    CHECK(borderline_angle(N, 3.0) == doctest::Approx(-borderline_angle(H, 3.0)));
    CHECK(borderline_curvature(N, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("layer ODE and derivative consistency") {
    const double h = 1e-5;
    for (double th : {pi, pi / 2, 0.1}) {
        const auto B = make_borderline(th);
        for (double s = h; s <= 30.0; s += 0.173) {
            const double d = (borderline_angle(B, s + h) - borderline_angle(B, s - h)) / (2 * h);
            CHECK(std::abs(d * d - (1.0 - std::cos(borderline_angle(B, s)))) <= 1e-10);
            CHECK(std::abs(d - borderline_curvature(B, s)) <= 1e-8);
        }
    }
}

TEST_CASE("monotone decay and exponential bound") {
    for (double th : {pi, pi / 2, -1.0}) {
        const auto B = make_borderline(th);
        double prev = std::abs(borderline_angle(B, 0.0));
        for (double s = 0.05; s <= 40.0; s += 0.05) {
            const double a = std::abs(borderline_angle(B, s));
            CHECK(a < prev);
            CHECK(a <= 4.0 * std::exp(-(s + B.shift) / s2) * (1 + 1e-15));
            prev = a;
        }
    }
}

TEST_CASE("explicit coordinates") {
    const auto P = make_borderline(pi);
    const auto o = borderline_point(P, 0.0);
    CHECK(o[0] == 0.0);
    CHECK(o[1] == 0.0);
    const auto far = borderline_point(P, 80.0);
    CHECK(far[0] - 80.0 == doctest::Approx(-2 * s2).epsilon(1e-12));
    CHECK(std::abs(far[1]) == doctest::Approx(2 * s2).epsilon(1e-12));
    for (double th : {pi, pi / 2, -2.0}) {
        const auto B = make_borderline(th);
        const std::size_t n = 4096;
        const auto pts = reconstruct_positions(sample_borderline(B, 30.0, n));
        double dev = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const auto q = borderline_point(B, 30.0 * i / n);
            dev = std::max(dev, std::hypot(q[0] - pts[i][0], q[1] - pts[i][1]));
        }
        CHECK(dev <= 5.0 * std::pow(30.0 / n, 2));
    }
}

TEST_CASE("layer energy") {
    const auto P = make_borderline(pi), H = make_borderline(pi / 2);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(borderline_energy(P, 0.0, inf) == doctest::Approx(4 * s2).epsilon(1e-14));
    CHECK(borderline_energy(H, 0.0, inf) == doctest::Approx(8 * s2 * std::pow(std::sin(pi / 8), 2)).epsilon(1e-14));
    CHECK(borderline_energy(H, 2.0, 2.0) == 0.0);
    // quadrature of the integrand on a long window
    const long double q = oracle::integrate(
        [&](long double s) {
            const double sd = static_cast<double>(s);
            const double k = borderline_curvature(H, sd), a = borderline_angle(H, sd);
            return static_cast<long double>(k * k + (1.0 - std::cos(a)));
        },
        0.0L, 80.0L, 1e-14L);
    CHECK(borderline_energy(H, 0.0, 80.0) == doctest::Approx(static_cast<double>(q)).epsilon(1e-11));
    CHECK(borderline_energy(H, 0.5, 3.0) ==
          doctest::Approx(std::abs(weighted_variation(borderline_angle(H, 3.0)) -
                                   weighted_variation(borderline_angle(H, 0.5))))
              .epsilon(1e-13));
}
