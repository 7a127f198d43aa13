#pragma once
// Reference computations used only by the tests: adaptive quadrature and bisection,
// both in long double and independent of the library code paths.

#include <cmath>
#include <functional>

namespace oracle {

using Fn = std::function<long double(long double)>;

inline long double simpson(long double a, long double fa, long double fm, long double b, long double fb) {
    return (b - a) / 6.0L * (fa + 4.0L * fm + fb);
}

inline long double adapt(const Fn& f, long double a, long double fa, long double b, long double fb, long double m,
                         long double fm, long double whole, long double tol, int depth) {
    const long double lm = 0.5L * (a + m), rm = 0.5L * (m + b);
    const long double flm = f(lm), frm = f(rm);
    const long double left = simpson(a, fa, flm, m, fm), right = simpson(m, fm, frm, b, fb);
    const long double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0L * tol)
        return left + right + delta / 15.0L;
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5L * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5L * tol, depth - 1);
}

// Adaptive Simpson with Richardson correction.
inline long double integrate(const Fn& f, long double a, long double b, long double tol = 1e-15L) {
    const long double m = 0.5L * (a + b);
    const long double fa = f(a), fb = f(b), fm = f(m);
    return adapt(f, a, fa, b, fb, m, fm, simpson(a, fa, fm, b, fb), tol, 50);
}

// Root of a sign-changing f on [a, b].
inline long double bisect(const Fn& f, long double a, long double b, int iters = 200) {
    long double fa = f(a);
    for (int i = 0; i < iters; ++i) {
        const long double m = 0.5L * (a + b);
        const long double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5L * (a + b);
}

// K(k) via the substitution t = sin(phi), which removes the endpoint singularity.
inline long double K(long double k) {
    return integrate([k](long double p) { return 1.0L / std::sqrt(1.0L - k * k * std::sin(p) * std::sin(p)); }, 0.0L,
                     std::acos(-1.0L) / 2.0L);
}

inline long double F(long double xi, long double k) {
    return integrate([k](long double p) { return 1.0L / std::sqrt(1.0L - k * k * std::sin(p) * std::sin(p)); }, 0.0L,
                     std::asin(xi));
}

} // namespace oracle
