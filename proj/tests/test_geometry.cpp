#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "elastica/borderline.hpp"
#include "elastica/geometry.hpp"

using namespace elastica;
namespace {
constexpr double pi = std::numbers::pi;
constexpr double s2 = std::numbers::sqrt2;

DiscreteCurve from_fn(double L, std::size_t N, auto f) {
    DiscreteCurve c;
    c.length = L;
    c.theta.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i)
        c.theta[i] = f(L * static_cast<double>(i) / static_cast<double>(N));
    return c;
}

// Smooth random angle function: a few random Fourier modes.
DiscreteCurve random_curve(std::mt19937_64& rng, std::size_t N) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double L = 1.0 + 0.5 * (U(rng) + 1.0);
    double a[5], b[5];
    for (int j = 0; j < 5; ++j) {
        a[j] = 1.5 * U(rng) / (j + 1);
        b[j] = 1.5 * U(rng) / (j + 1);
    }
    const double c0 = 2.0 * U(rng);
    return from_fn(L, N, [&](double s) {
        double t = c0;
        for (int j = 0; j < 5; ++j)
            t += a[j] * std::cos((j + 1) * s / L * pi) + b[j] * std::sin((j + 1) * s / L * pi);
        return t;
    });
}
} // namespace

TEST_CASE("boundary condition validation") {
    CHECK_NOTHROW((BoundaryCondition{1.0, pi, -pi}.validate()));
    CHECK_THROWS_AS((BoundaryCondition{0.0, 0.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((BoundaryCondition{1.0, 3.5, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("reconstruct positions") {
    const auto seg = from_fn(1.0, 10, [](double) { return 0.0; });
    const auto p = endpoint(seg);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[1] == 0.0);
    const auto up = endpoint(from_fn(1.0, 10, [](double) { return pi / 2; }));
    CHECK(std::abs(up[0]) <= 1e-14);
    CHECK(std::abs(up[1] - 1.0) <= 1e-14);
    const auto circ = endpoint(from_fn(2 * pi, 4096, [](double s) { return s; }));
    CHECK(std::hypot(circ[0], circ[1]) <= 1e-5);
    const auto pts = reconstruct_positions(seg);
    CHECK(pts.front()[0] == 0.0);
    CHECK(pts.front()[1] == 0.0);
}

TEST_CASE("energies of a segment") {
    const auto e = energies(straight_segment(1.0, 64), 0.1);
    CHECK(e.bending == 0.0);
    CHECK(e.f_eps == 0.0);
    CHECK(e.e_eps == doctest::Approx(1.0));
}

TEST_CASE("borderline piece from pi carries f_eps -> 4 sqrt2") {
    const auto spec = make_borderline(pi);
    double prev = 1e300;
    for (std::size_t N : {1024u, 4096u, 16384u}) {
        const auto e = energies(sample_borderline(spec, 60.0, N), 1.0);
        const double err = std::abs(e.f_eps - 4.0 * s2);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev <= 1e-5);
}

TEST_CASE("arc of radius eps: analytic integrand") {
    // theta = s / eps on [0, eps phi]: eps*kappa^2 and (1 - cos)/eps integrate to phi and phi - sin(phi)
    const double eps = 0.05;
    for (double phi : {0.3, 1.5, pi}) {
        const std::size_t N = 1u << 17;
        const auto c = from_fn(eps * phi, N, [&](double s) { return s / eps; });
        const auto e = energies(c, eps);
        CHECK(std::abs(e.f_eps - (2 * phi - std::sin(phi))) <= 1e-10);
        CHECK(e.bending == doctest::Approx(phi / eps).epsilon(1e-9));  // differencing rounding at N = 2^17
    }
}

TEST_CASE("weighted variation") {
    CHECK(weighted_variation(0.0) == 0.0);
    CHECK(weighted_variation(pi) == doctest::Approx(4 * s2).epsilon(1e-15));
    CHECK(weighted_variation(2 * pi) == doctest::Approx(8 * s2).epsilon(1e-15));
    CHECK(weighted_variation(-pi) == doctest::Approx(-4 * s2).epsilon(1e-15));
    // matches the defining integral; Simpson on a fine grid
    for (double t : {-5.0, -1.0, 0.7, 3.0, 9.0}) {
        const int n = 20000;
        const double h = t / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
            s += w * 2.0 * std::sqrt(1.0 - std::cos(i * h));
        }
        CHECK(weighted_variation(t) == doctest::Approx(s * h / 3.0).epsilon(1e-8));
    }
    double prev = weighted_variation(-10.0);
    for (double t = -9.9; t < 10.0; t += 0.1) {
        const double v = weighted_variation(t);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("winding number") {
    const BoundaryCondition flat{1.0, 0.0, 0.0};
    CHECK(winding_number(straight_segment(1.0, 128), flat) == 0);
    // a loop: theta rises by 2pi over a short window
    auto loop = from_fn(1.2, 2048, [](double s) {
        const double x = std::clamp((s - 0.4) / 0.3, 0.0, 1.0);
        return 2 * pi * x * x * (3 - 2 * x);
    });
    CHECK(winding_number(loop, flat) == 1);
    auto finer = from_fn(1.2, 4096, [](double s) {
        const double x = std::clamp((s - 0.4) / 0.3, 0.0, 1.0);
        return 2 * pi * x * x * (3 - 2 * x);
    });
    CHECK(winding_number(finer, flat) == 1);
    CHECK(winding_number(from_fn(2 * pi, 512, [](double s) { return s; }), flat) == 1);
    // a loop that rises and comes back has no net winding
    auto back = from_fn(1.0, 1024, [](double s) { return 2 * pi * std::sin(pi * s); });
    CHECK(winding_number(back, flat) == 0);
    CHECK_THROWS(winding_number(straight_segment(1.0, 64), BoundaryCondition{1.0, 0.0, 1.0}));
}

TEST_CASE("rescale") {
    const auto c = from_fn(2.0, 400, [](double s) { return std::sin(3 * s); });
    const auto r = rescale(c, 0.5, 4.0);
    CHECK(r.length == doctest::Approx(4.0));
    for (std::size_t i = 0; i < r.theta.size(); ++i)
        CHECK(std::abs(r.theta[i] - angle_at(c, 0.5 * r.length * i / r.intervals())) <= 1e-12);
    const double eps = 0.01;
    const auto circ = from_fn(2 * pi * eps, 2000, [&](double s) { return s / eps; });
    for (double k : curvature(rescale(circ, eps, 3.0)))
        CHECK(std::abs(k - 1.0) <= 1e-12);
    CHECK_THROWS(rescale(c, 0.5, 5.0));
}

TEST_CASE("F additivity over partitions") {
    std::mt19937_64 rng(7);
    const auto c = random_curve(rng, 4096);
    const auto k = curvature(c);
    const double eps = 0.07;
    const double whole = f_eps_range(c, k, eps, 0, 4096);
    CHECK(whole == doctest::Approx(energies(c, eps).f_eps).epsilon(1e-14));
    const std::size_t cuts[] = {0, 17, 900, 901, 2500, 4096};
    double sum = 0.0;
    for (int i = 0; i + 1 < 6; ++i) {
        const double part = f_eps_range(c, k, eps, cuts[i], cuts[i + 1]);
        CHECK(part >= 0.0);
        sum += part;
    }
    CHECK(std::abs(sum - whole) <= 1e-13 * whole);
}

TEST_CASE("V lower bound on random smooth curves") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> E(0.01, 1.0);
    for (int t = 0; t < 50; ++t) {
        const auto c = random_curve(rng, 4096);
        const double eps = E(rng);
        const double f = energies(c, eps).f_eps;
        const double bound = std::abs(weighted_variation(c.theta.back()) - weighted_variation(c.theta.front()));
        CHECK(f >= bound - 1e-6);
    }
}

TEST_CASE("E and F agree on admissible curves") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 10; ++t) {
        const auto c = random_curve(rng, 4096);
        const double l = endpoint(c)[0];
        if (!(l > 0.0))
            continue;
        const double eps = 0.1;
        const auto e = energies(c, eps);
        CHECK(std::abs((e.e_eps - l) / eps - e.f_eps) <= 1e-6);
    }
}

TEST_CASE("angle helpers and JSON round trip") {
    CHECK(reduce_angle(pi) == doctest::Approx(-pi));
    CHECK(reduce_angle(7.0) == doctest::Approx(7.0 - 2 * pi));
    std::mt19937_64 rng(3);
    const auto c = random_curve(rng, 256);
    const auto d = curve_from_json(nlohmann::json::parse(to_json(c).dump()));
    CHECK(d.length == c.length);
    CHECK(d.theta == c.theta);
    DiscreteCurve jump{1.0, {0.0, 0.1, 4.0, 4.1}};
    CHECK(jump.has_angle_jumps());
    CHECK_FALSE(c.has_angle_jumps());
}
