#pragma once

// Jacobi elliptic functions and the incomplete/complete integral of the first kind.
// All routines accept the modulus k (not the parameter m = k^2).

namespace elastica {

struct JacobiTriple {
    double sn;
    double cn;
    double dn;
};

// Complementary modulus sqrt(1 - k^2), computed without cancellation near k = 1.
double complementary_modulus(double k);

double ellint_K(double k);
// Same, but takes the complementary modulus directly (needed when 1 - k is below
// double resolution).
double ellint_K_kc(double kc);

// F(xi; k) = int_0^xi dt / (sqrt(1-t^2) sqrt(1-k^2 t^2)).
double ellint_F(double xi, double k);

JacobiTriple jacobi(double x, double k);
JacobiTriple jacobi_kc(double x, double k, double kc);

// Amplitude am(x, k), unwrapped: am(x + 2K) = am(x) + pi.
double jacobi_am(double x, double k);
double jacobi_am_kc(double x, double k, double kc);

} // namespace elastica
