#include "elastica/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace elastica {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAgmTol = 1e-15;

void check_modulus(double k) {
    if (!(k >= 0.0 && k <= 1.0))
        throw std::domain_error("elliptic modulus must lie in [0, 1]");
}

double agm(double a, double b) {
    for (int it = 0; it < 64 && std::abs(a - b) > kAgmTol * a; ++it) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return 0.5 * (a + b);
}

// Carlson's symmetric integral R_F by duplication.
double carlson_rf(double x, double y, double z) {
    constexpr double errtol = 8e-4;
    for (int it = 0; it < 200; ++it) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        const double ave = (x + y + z) / 3.0;
        const double dx = (ave - x) / ave, dy = (ave - y) / ave, dz = (ave - z) / ave;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < errtol) {
            const double e2 = dx * dy - dz * dz;
            const double e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(ave);
        }
    }
    throw std::runtime_error("carlson_rf did not converge");
}

// Descending Landen / AGM scheme on a reduced argument |x| <= 2K.
double amplitude_reduced(double x, double k, double kc) {
    double a[40], c[40];
    a[0] = 1.0;
    c[0] = k;
    double b = kc;
    int n = 0;
    while (std::abs(c[n]) > kAgmTol * a[n] && n < 38) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double phi = std::ldexp(a[n] * x, n);
    for (int j = n; j > 0; --j)
        phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));
    return phi;
}

// Splits x = q * 4K + r with |r| <= 2K. The product is formed exactly via fma.
double fold_quarter_periods(double x, double K, double& q) {
    const double period = 4.0 * K;
    q = std::nearbyint(x / period);
    return std::fma(-q, period, x);
}

} // namespace

double complementary_modulus(double k) {
    check_modulus(k);
    return std::sqrt((1.0 - k) * (1.0 + k));
}

double ellint_K_kc(double kc) {
    if (!(kc > 0.0 && kc <= 1.0))
        throw std::domain_error("ellint_K: modulus must be < 1");
    return kPi / (2.0 * agm(1.0, kc));
}

double ellint_K(double k) {
    check_modulus(k);
    if (k == 1.0)
        throw std::domain_error("ellint_K diverges at k = 1");
    return ellint_K_kc(complementary_modulus(k));
}

double ellint_F(double xi, double k) {
    check_modulus(k);
    if (!(std::abs(xi) <= 1.0))
        throw std::domain_error("ellint_F: |xi| must be <= 1");
    if (std::abs(xi) == 1.0) {
        if (k == 1.0)
            throw std::domain_error("ellint_F diverges at xi = +-1, k = 1");
        return std::copysign(ellint_K(k), xi);
    }
    if (xi == 0.0)
        return 0.0;
    if (k == 0.0)
        return std::asin(xi);
    if (k == 1.0)
        return std::atanh(xi);
    const double x = (1.0 - xi) * (1.0 + xi);
    const double y = (1.0 - k * xi) * (1.0 + k * xi);
    return xi * carlson_rf(x, y, 1.0);
}

double jacobi_am_kc(double x, double k, double kc) {
    if (k == 0.0)
        return x;
    if (kc == 0.0)
        return std::atan(std::sinh(x));
    double q = 0.0;
    const double r = fold_quarter_periods(x, ellint_K_kc(kc), q);
    return amplitude_reduced(r, k, kc) + 2.0 * kPi * q;
}

double jacobi_am(double x, double k) {
    return jacobi_am_kc(x, k, complementary_modulus(k));
}

JacobiTriple jacobi_kc(double x, double k, double kc) {
    if (k == 0.0)
        return {std::sin(x), std::cos(x), 1.0};
    if (kc == 0.0) {
        const double sech = 1.0 / std::cosh(x);
        return {std::tanh(x), sech, sech};
    }
    double q = 0.0;
    const double r = fold_quarter_periods(x, ellint_K_kc(kc), q);
    const double phi = amplitude_reduced(r, k, kc);
    const double s = std::sin(phi), c = std::cos(phi);
    return {s, c, std::sqrt(kc * kc + k * k * c * c)};
}

JacobiTriple jacobi(double x, double k) {
    return jacobi_kc(x, k, complementary_modulus(k));
}

} // namespace elastica
