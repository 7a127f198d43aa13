#include "elastica/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace elastica {

namespace {
constexpr double kPi = std::numbers::pi;
const double kV = 8.0 * std::numbers::sqrt2;
} // namespace

void BoundaryCondition::validate() const {
    if (!(l > 0.0) || !std::isfinite(l))
        throw std::invalid_argument("boundary condition requires l > 0");
    if (!(std::abs(theta0) <= kPi) || !(std::abs(theta1) <= kPi))
        throw std::invalid_argument("boundary angles must lie in [-pi, pi]");
}

void DiscreteCurve::validate() const {
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("curve length must be positive");
    if (theta.size() < 3)
        throw std::invalid_argument("curve needs at least 2 intervals");
    for (double t : theta)
        if (!std::isfinite(t))
            throw std::invalid_argument("non-finite tangential angle");
}

bool DiscreteCurve::has_angle_jumps() const {
    for (std::size_t i = 0; i + 1 < theta.size(); ++i)
        if (std::abs(theta[i + 1] - theta[i]) >= kPi)
            return true;
    return false;
}

DiscreteCurve straight_segment(double l, std::size_t N) {
    return {l, std::vector<double>(N + 1, 0.0)};
}

std::vector<double> differentiate(const std::vector<double>& g, double h) {
    const std::size_t n = g.size();
    std::vector<double> d(n, 0.0);
    if (n < 3)
        return d;
    const double inv2h = 0.5 / h;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (g[i + 1] - g[i - 1]) * inv2h;
    d[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) * inv2h;
    d[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) * inv2h;
    return d;
}

std::vector<double> curvature(const DiscreteCurve& curve) {
    return differentiate(curve.theta, curve.step());
}

std::vector<Point> reconstruct_positions(const DiscreteCurve& curve) {
    const std::size_t n = curve.theta.size();
    const double h = curve.step();
    std::vector<Point> p(n, Point{0.0, 0.0});
    double c0 = std::cos(curve.theta[0]), s0 = std::sin(curve.theta[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double c1 = std::cos(curve.theta[i]), s1 = std::sin(curve.theta[i]);
        p[i][0] = p[i - 1][0] + 0.5 * h * (c0 + c1);
        p[i][1] = p[i - 1][1] + 0.5 * h * (s0 + s1);
        c0 = c1;
        s0 = s1;
    }
    return p;
}

Point endpoint(const DiscreteCurve& curve) {
    const std::size_t n = curve.theta.size();
    double x = 0.0, y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        x += w * std::cos(curve.theta[i]);
        y += w * std::sin(curve.theta[i]);
    }
    const double h = curve.step();
    return {h * x, h * y};
}

double f_eps_range(const DiscreteCurve& curve, const std::vector<double>& kappa, double eps,
                   std::size_t i0, std::size_t i1) {
    const double h = curve.step();
    double sum = 0.0;
    for (std::size_t i = i0; i <= i1; ++i) {
        const double w = (i == i0 || i == i1) ? 0.5 : 1.0;
        // 1 - cos(t) = 2 sin^2(t/2) avoids cancellation on nearly straight parts.
        const double sh = std::sin(0.5 * curve.theta[i]);
        sum += w * (eps * kappa[i] * kappa[i] + 2.0 * sh * sh / eps);
    }
    return i1 > i0 ? h * sum : 0.0;
}

EnergyReport energies(const DiscreteCurve& curve, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("energies: eps must be positive");
    const auto kappa = curvature(curve);
    const std::size_t n = kappa.size();
    const double h = curve.step();
    double b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        b += w * kappa[i] * kappa[i];
    }
    EnergyReport r;
    r.bending = h * b;
    r.length = curve.length;
    r.e_eps = eps * eps * r.bending + r.length;
    r.f_eps = f_eps_range(curve, kappa, eps, 0, n - 1);
    return r;
}

double reduce_angle(double theta) {
    double r = std::fmod(theta + kPi, 2.0 * kPi);
    if (r < 0.0)
        r += 2.0 * kPi;
    return r - kPi;
}

double weighted_variation(double theta) {
    const double m = std::floor((theta + kPi) / (2.0 * kPi));
    const double r = theta - 2.0 * kPi * m;
    const double s = std::sin(0.25 * r);
    return kV * m + std::copysign(kV * s * s, r);
}

int winding_number(const DiscreteCurve& curve, const BoundaryCondition& bc) {
    const double total = curve.theta.back() - curve.theta.front();
    const double w = (total + bc.theta0 - bc.theta1) / (2.0 * kPi);
    const double r = std::round(w);
    if (std::abs(w - r) > 1e-6)
        throw std::invalid_argument("winding number is not an integer: curve and boundary data disagree");
    return static_cast<int>(r);
}

double angle_at(const DiscreteCurve& curve, double s) {
    const std::size_t n = curve.intervals();
    const double u = s / curve.step();
    if (u <= 0.0)
        return curve.theta.front();
    if (u >= static_cast<double>(n))
        return curve.theta.back();
    const auto i = static_cast<std::size_t>(u);
    const double t = u - static_cast<double>(i);
    if (i >= n)
        return curve.theta.back();
    return (1.0 - t) * curve.theta[i] + t * curve.theta[i + 1];
}

DiscreteCurve rescale(const DiscreteCurve& curve, double eps, double c) {
    const double window = c * eps;
    if (!(eps > 0.0) || !(c > 0.0))
        throw std::invalid_argument("rescale: eps and c must be positive");
    if (window > curve.length * (1.0 + 1e-12))
        throw std::invalid_argument("rescale: window exceeds curve length");
    const double ratio = window / curve.step();
    auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
    n = std::max<std::size_t>(n, 2);
    DiscreteCurve out;
    out.length = c;
    out.theta.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        out.theta[j] = angle_at(curve, window * static_cast<double>(j) / static_cast<double>(n));
    return out;
}

nlohmann::json to_json(const DiscreteCurve& curve) {
    return {{"length", curve.length}, {"theta", curve.theta}};
}

DiscreteCurve curve_from_json(const nlohmann::json& j) {
    DiscreteCurve c;
    c.length = j.at("length").get<double>();
    c.theta = j.at("theta").get<std::vector<double>>();
    c.validate();
    return c;
}

nlohmann::json to_json(const EnergyReport& e) {
    return {{"bending", e.bending}, {"length", e.length}, {"e_eps", e.e_eps}, {"f_eps", e.f_eps}};
}

nlohmann::json to_json(const BoundaryCondition& bc) {
    return {{"l", bc.l}, {"theta0", bc.theta0}, {"theta1", bc.theta1}};
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    os << j.dump(1) << '\n';
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot read " + path);
    return nlohmann::json::parse(is);
}

} // namespace elastica
