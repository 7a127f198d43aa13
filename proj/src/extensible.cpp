#include "elastica/extensible.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace elastica {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// ---------------------------------------------------------------------------
// Piecewise angle paths used for the explicit test curve and multistart seeds.

// Layer with relative angle rel in (-2pi, 2pi), decaying to 0 in rescaled units.
// Unlike BorderlineSpec, |rel| > pi is allowed (negative shift): those layers seed
// the starts that leave the initial direction the long way round.
struct Layer {
    double rel = 0.0;
    double sign = 0.0;
    double shift = 0.0;

    explicit Layer(double r) : rel(r), sign(sgn(r)) {
        if (r != 0.0)
            shift = -kSqrt2 * std::log(std::tan(0.25 * std::abs(r)));
    }
    bool empty() const { return rel == 0.0; }
    double angle(double t) const {
        if (t == 0.0)
            return rel;
        return sign * 4.0 * std::atan(std::exp(-(t + shift) / kSqrt2));
    }
    Point point(double t) const {
        const double u = (t + shift) / kSqrt2, u0 = shift / kSqrt2;
        const double x = t - 2.0 * kSqrt2 * (std::tanh(u) - std::tanh(u0));
        const double y = -2.0 * kSqrt2 * (1.0 / std::cosh(u) - 1.0 / std::cosh(u0));
        return {x, sign * y};
    }
};

struct Piece {
    enum Kind { LayerForward, LayerReversed, Linear } kind;
    double length;
    double base;  // additive angle offset (multiple of 2pi for layers)
    double a, b;  // Linear: angle runs from a to b
    Layer layer{0.0};
};

struct AnglePath {
    std::vector<Piece> pieces;
    double eps = 1.0;
    double first = 0.0, last = 0.0;

    double total() const {
        double t = 0.0;
        for (const auto& p : pieces)
            t += p.length;
        return t;
    }
    double eval(double s) const {
        for (const auto& p : pieces) {
            if (s <= p.length || &p == &pieces.back()) {
                s = std::clamp(s, 0.0, p.length);
                switch (p.kind) {
                case Piece::LayerForward:
                    return p.base + p.layer.angle(s / eps);
                case Piece::LayerReversed:
                    return p.base + p.layer.angle((p.length - s) / eps);
                case Piece::Linear:
                    return p.length > 0.0 ? p.a + (p.b - p.a) * s / p.length : p.b;
                }
            }
            s -= p.length;
        }
        return last;
    }
    DiscreteCurve sample(std::size_t N) const {
        DiscreteCurve c;
        c.length = total();
        c.theta.resize(N + 1);
        for (std::size_t i = 0; i <= N; ++i)
            c.theta[i] = eval(c.length * static_cast<double>(i) / static_cast<double>(N));
        c.theta.front() = first;
        c.theta.back() = last;
        return c;
    }
};

// Displacement of a circular arc of radius eps turning from angle a to angle b.
Point arc_displacement(double a, double b, double eps) {
    if (a == b)
        return {0.0, 0.0};
    const double s = sgn(b - a);
    return {eps * s * (std::sin(b) - std::sin(a)), eps * s * (std::cos(a) - std::cos(b))};
}

// start layer relative angle r0 on top of plateau 2*pi*j, then q full loops, then the
// end layer with relative angle e1 on top of plateau 2*pi*(j+q).
AnglePath build_path(const BoundaryCondition& bc, double eps, double alpha, int j, int q, double e1) {
    const double w = std::pow(eps, alpha - 1.0);  // layer window in rescaled units
    const double layer_len = eps * w;
    const double r0 = bc.theta0 - 2.0 * kPi * j;
    const Layer L0(r0), L1(e1);
    const double base0 = 2.0 * kPi * j;
    const double base1 = 2.0 * kPi * (j + q);

    double used = 0.0;
    Point p0{0.0, 0.0};
    double a = 0.0;
    if (!L0.empty()) {
        const Point pt = L0.point(w);
        p0 = {eps * pt[0], eps * pt[1]};
        a = L0.angle(w);
        used += layer_len;
    }
    Point q0{bc.l, 0.0};
    double b = 0.0;
    if (!L1.empty()) {
        const Point pt = L1.point(w);
        q0 = {bc.l - eps * pt[0], -eps * pt[1]};
        b = L1.angle(w);
        used += layer_len;
    }
    if (used >= bc.l)
        throw std::runtime_error("test curve: boundary layers do not fit (eps too large)");

    auto gap = [&](double psi) {
        const Point d1 = arc_displacement(a, psi, eps);
        const Point d2 = arc_displacement(psi, b, eps);
        return Point{q0[0] - p0[0] - d1[0] - d2[0], q0[1] - p0[1] - d1[1] - d2[1]};
    };
    auto cross = [&](double psi) {
        const Point g = gap(psi);
        return std::cos(psi) * g[1] - std::sin(psi) * g[0];
    };
    double lo = -0.5 * kPi, hi = 0.5 * kPi;
    double flo = cross(lo), fhi = cross(hi);
    if (!(flo > 0.0 && fhi < 0.0))
        throw std::runtime_error("test curve: connector heading not bracketed");
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cross(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double psi = 0.5 * (lo + hi);
    const Point g = gap(psi);
    const double d = std::cos(psi) * g[0] + std::sin(psi) * g[1];
    if (!(d > 0.0))
        throw std::runtime_error("test curve: connector segment has non-positive length");

    AnglePath path;
    path.eps = eps;
    path.first = bc.theta0;
    path.last = base1 + e1;
    if (!L0.empty())
        path.pieces.push_back({Piece::LayerForward, layer_len, base0, 0.0, 0.0, L0});
    path.pieces.push_back({Piece::Linear, eps * std::abs(psi - a), 0.0, base0 + a, base0 + psi, Layer(0.0)});
    path.pieces.push_back({Piece::Linear, 0.5 * d, 0.0, base0 + psi, base0 + psi, Layer(0.0)});
    if (q != 0)
        path.pieces.push_back(
            {Piece::Linear, 2.0 * kPi * eps * std::abs(q), 0.0, base0 + psi, base1 + psi, Layer(0.0)});
    path.pieces.push_back({Piece::Linear, 0.5 * d, 0.0, base1 + psi, base1 + psi, Layer(0.0)});
    path.pieces.push_back({Piece::Linear, eps * std::abs(b - psi), 0.0, base1 + psi, base1 + b, Layer(0.0)});
    if (!L1.empty())
        path.pieces.push_back({Piece::LayerReversed, layer_len, base1, 0.0, 0.0, L1});
    return path;
}

double default_alpha(double l, double eps) {
    double alpha = 0.5;
    while (alpha < 0.95 && 2.0 * std::pow(eps, alpha) >= 0.8 * l)
        alpha += 0.05;
    return alpha;
}

// ---------------------------------------------------------------------------
// Linear algebra helpers.

// Tridiagonal solve with partial pivoting (LAPACK gtsv scheme), several right-hand sides.
template <std::size_t R>
bool solve_tridiagonal(std::vector<double> dl, std::vector<double> d, std::vector<double> du,
                       std::vector<std::array<double, R>>& b) {
    const std::size_t n = d.size();
    if (n == 0)
        return true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0)
                return false;
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            for (std::size_t r = 0; r < R; ++r)
                b[i + 1][r] -= fact * b[i][r];
            dl[i] = 0.0;
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            for (std::size_t r = 0; r < R; ++r) {
                const double t = b[i][r];
                b[i][r] = b[i + 1][r];
                b[i + 1][r] = t - fact * b[i + 1][r];
            }
        }
    }
    if (d[n - 1] == 0.0)
        return false;
    for (std::size_t r = 0; r < R; ++r) {
        b[n - 1][r] /= d[n - 1];
        if (n > 1)
            b[n - 2][r] = (b[n - 2][r] - du[n - 2] * b[n - 1][r]) / d[n - 2];
        for (std::size_t i = n - 2; i-- > 0;)
            b[i][r] = (b[i][r] - du[i] * b[i + 1][r] - dl[i] * b[i + 2][r]) / d[i];
    }
    return true;
}

bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3>& x) {
    for (int c = 0; c < 3; ++c) {
        int p = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c]))
                p = r;
        if (a[p][c] == 0.0)
            return false;
        std::swap(a[p], a[c]);
        std::swap(x[p], x[c]);
        for (int r = c + 1; r < 3; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < 3; ++k)
                a[r][k] -= f * a[c][k];
            x[r] -= f * x[c];
        }
    }
    for (int c = 2; c >= 0; --c) {
        for (int k = c + 1; k < 3; ++k)
            x[c] -= a[c][k] * x[k];
        x[c] /= a[c][c];
    }
    return true;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

// ---------------------------------------------------------------------------
// Discrete problem. Variables z = (theta_1 .. theta_{N-1}, L); theta_0 and theta_N pinned.
// Bending uses edge differences, sum (theta_{i+1} - theta_i)^2 / h, which has no
// odd-even null mode; reported energies always go through energies().

class Problem {
public:
    Problem(const BoundaryCondition& bc, double eps, std::size_t N, double theta_end)
        : l_(bc.l), eps_(eps), N_(N), th0_(bc.theta0), th1_(theta_end) {}

    std::size_t size() const { return N_; }

    void unpack(const std::vector<double>& z, std::vector<double>& theta) const {
        theta.resize(N_ + 1);
        theta[0] = th0_;
        theta[N_] = th1_;
        for (std::size_t i = 1; i < N_; ++i)
            theta[i] = z[i - 1];
    }

    std::vector<double> pack(const DiscreteCurve& c) const {
        std::vector<double> z(N_);
        for (std::size_t i = 1; i < N_; ++i)
            z[i - 1] = c.theta[i];
        z[N_ - 1] = c.length;
        return z;
    }

    DiscreteCurve curve(const std::vector<double>& z) const {
        DiscreteCurve c;
        c.length = z[N_ - 1];
        unpack(z, c.theta);
        return c;
    }

    struct Parts {
        double sum_d2 = 0.0;
        double cx = 0.0;  // x-endpoint minus l
        double cy = 0.0;
    };

    Parts parts(const std::vector<double>& theta, double L) const {
        Parts p;
        double sx = 0.5 * (std::cos(theta[0]) + std::cos(theta[N_]));
        double sy = 0.5 * (std::sin(theta[0]) + std::sin(theta[N_]));
        for (std::size_t i = 0; i < N_; ++i) {
            const double d = theta[i + 1] - theta[i];
            p.sum_d2 += d * d;
        }
        for (std::size_t i = 1; i < N_; ++i) {
            sx += std::cos(theta[i]);
            sy += std::sin(theta[i]);
        }
        const double h = L / static_cast<double>(N_);
        p.cx = h * sx - l_;
        p.cy = h * sy;
        return p;
    }

    double bending_coeff(double L) const { return eps_ * eps_ * static_cast<double>(N_) / L; }

    // Augmented Lagrangian f - lx cx - ly cy + mu/2 (cx^2 + cy^2) and its gradient.
    double al(const std::vector<double>& z, double lx, double ly, double mu, std::vector<double>& g,
              std::vector<double>& theta) const {
        const double L = z[N_ - 1];
        if (!(L > 0.0))
            return std::numeric_limits<double>::infinity();
        unpack(z, theta);
        const Parts p = parts(theta, L);
        const double c = bending_coeff(L);
        const double h = L / static_cast<double>(N_);
        const double px = -lx + mu * p.cx;
        const double py = -ly + mu * p.cy;
        g.resize(N_);
        for (std::size_t i = 1; i < N_; ++i) {
            const double lap = 2.0 * theta[i] - theta[i - 1] - theta[i + 1];
            g[i - 1] = 2.0 * c * lap - px * h * std::sin(theta[i]) + py * h * std::cos(theta[i]);
        }
        g[N_ - 1] = -c / L * p.sum_d2 + 1.0 + px * (p.cx + l_) / L + py * p.cy / L;
        return c * p.sum_d2 + L - lx * p.cx - ly * p.cy + 0.5 * mu * (p.cx * p.cx + p.cy * p.cy);
    }

    // Lagrangian residual: r_theta (size N-1), r_L, then cx, cy.
    struct Residual {
        std::vector<double> rt;
        double rl = 0.0, cx = 0.0, cy = 0.0;
        double stationarity = 0.0;
        double merit = 0.0;
    };

    Residual residual(const std::vector<double>& theta, double L, double lx, double ly) const {
        Residual r;
        const Parts p = parts(theta, L);
        const double c = bending_coeff(L);
        const double h = L / static_cast<double>(N_);
        r.rt.resize(N_ - 1);
        double maxr = 0.0, sq = 0.0;
        for (std::size_t i = 1; i < N_; ++i) {
            const double lap = 2.0 * theta[i] - theta[i - 1] - theta[i + 1];
            const double v = 2.0 * c * lap + lx * h * std::sin(theta[i]) - ly * h * std::cos(theta[i]);
            r.rt[i - 1] = v;
            maxr = std::max(maxr, std::abs(v) / h);
            sq += v * v / h;
        }
        r.rl = -c / L * p.sum_d2 + 1.0 - lx * (p.cx + l_) / L - ly * p.cy / L;
        r.cx = p.cx;
        r.cy = p.cy;
        r.stationarity = std::max(maxr, std::abs(r.rl));
        r.merit = std::sqrt(sq + r.rl * r.rl + p.cx * p.cx + p.cy * p.cy);
        return r;
    }

    // Multipliers minimising the weighted Lagrangian residual.
    std::array<double, 2> least_squares_multipliers(const std::vector<double>& theta, double L) const {
        const Parts p = parts(theta, L);
        const double c = bending_coeff(L);
        const double h = L / static_cast<double>(N_);
        // residual = g + lx * a + ly * b in the weighted norm h * sum (./h)^2 + (.)^2
        double aa = 0, ab = 0, bb = 0, ag = 0, bg = 0;
        for (std::size_t i = 1; i < N_; ++i) {
            const double lap = 2.0 * theta[i] - theta[i - 1] - theta[i + 1];
            const double gi = 2.0 * c * lap / h, ai = std::sin(theta[i]), bi = -std::cos(theta[i]);
            aa += h * ai * ai;
            ab += h * ai * bi;
            bb += h * bi * bi;
            ag += h * ai * gi;
            bg += h * bi * gi;
        }
        const double gl = -c / L * p.sum_d2 + 1.0, al = -(p.cx + l_) / L, bl = -p.cy / L;
        aa += al * al;
        ab += al * bl;
        bb += bl * bl;
        ag += al * gl;
        bg += bl * gl;
        const double det = aa * bb - ab * ab;
        if (std::abs(det) < 1e-300)
            return {1.0, 0.0};
        return {-(bb * ag - ab * bg) / det, -(aa * bg - ab * ag) / det};
    }

    // One Newton step on the KKT system; returns false if the linear solve fails.
    bool newton_direction(const std::vector<double>& theta, double L, double lx, double ly, const Residual& r,
                          double shift, std::vector<double>& dtheta, double& dL, double& dlx, double& dly) const {
        const std::size_t n = N_ - 1;
        const Parts p = parts(theta, L);
        const double c = bending_coeff(L);
        const double h = L / static_cast<double>(N_);
        std::vector<double> dl(n > 0 ? n - 1 : 0, -2.0 * c), du(n > 0 ? n - 1 : 0, -2.0 * c), d(n);
        std::vector<std::array<double, 4>> rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double t = theta[j + 1];
            const double s = std::sin(t), co = std::cos(t);
            d[j] = 4.0 * c + lx * h * co + ly * h * s + shift * h;
            // d r_theta / dL: bending part scales like 1/L, constraint part like L
            const double X = lx * h * s - ly * h * co;
            rhs[j][0] = (-r.rt[j] + 2.0 * X) / L;
            rhs[j][1] = h * s;
            rhs[j][2] = -h * co;
            rhs[j][3] = r.rt[j];
        }
        const auto border = rhs;
        if (!solve_tridiagonal<4>(dl, d, du, rhs))
            return false;
        const double hll = 2.0 * c / (L * L) * p.sum_d2;
        const double xl = -(p.cx + l_) / L, yl = -p.cy / L;
        std::array<std::array<double, 3>, 3> S{{{hll, xl, yl}, {xl, 0.0, 0.0}, {yl, 0.0, 0.0}}};
        std::array<double, 3> v{-r.rl, r.cx, r.cy};  // -residual for rows L, -cx, -cy
        for (std::size_t j = 0; j < n; ++j) {
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b)
                    S[a][b] -= border[j][a] * rhs[j][b];
                v[a] += border[j][a] * rhs[j][3];
            }
        }
        if (!solve3(S, v))
            return false;
        dtheta.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            dtheta[j] = -rhs[j][3] - rhs[j][0] * v[0] - rhs[j][1] * v[1] - rhs[j][2] * v[2];
        dL = v[0];
        dlx = v[1];
        dly = v[2];
        return std::isfinite(dL) && std::isfinite(dlx) && std::isfinite(dly);
    }

    // Preconditioner: tridiagonal model of the bending Hessian plus a tension shift.
    struct Precond {
        std::vector<double> cp, dinv;  // Thomas factors
        double off = 0.0;
        double scale_l = 1.0;
    };

    Precond preconditioner(const std::vector<double>& z, double lx, double mu) const {
        const double L = z[N_ - 1];
        const double c = bending_coeff(L);
        const double h = L / static_cast<double>(N_);
        const std::size_t n = N_ - 1;
        Precond P;
        P.off = -2.0 * c;
        const double diag = 4.0 * c + h * std::max(std::abs(lx), 0.5);
        P.cp.resize(n);
        P.dinv.resize(n);
        double prev = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double dj = diag - (j > 0 ? P.off * prev : 0.0);
            P.dinv[j] = 1.0 / dj;
            prev = P.off * P.dinv[j];
            P.cp[j] = prev;
        }
        std::vector<double> theta;
        unpack(z, theta);
        const Parts p = parts(theta, L);
        P.scale_l = 2.0 * c / (L * L) * p.sum_d2 + mu * std::pow((p.cx + l_) / L, 2) + 1e-3;
        return P;
    }

    void apply(const Precond& P, const std::vector<double>& q, std::vector<double>& r) const {
        const std::size_t n = N_ - 1;
        r.resize(N_);
        double prev = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            prev = (q[j] - (j > 0 ? P.off * prev : 0.0)) * P.dinv[j];
            r[j] = prev;
        }
        for (std::size_t j = n - 1; j-- > 0;)
            r[j] -= P.cp[j] * r[j + 1];
        r[N_ - 1] = q[N_ - 1] / P.scale_l;
    }

    double scaled_norm(const std::vector<double>& g, double L) const {
        const double h = L / static_cast<double>(N_);
        double m = std::abs(g[N_ - 1]);
        for (std::size_t j = 0; j + 1 < N_; ++j)
            m = std::max(m, std::abs(g[j]) / h);
        return m;
    }

    double l() const { return l_; }
    double eps() const { return eps_; }

private:
    double l_, eps_;
    std::size_t N_;
    double th0_, th1_;
};

// Limited-memory BFGS with strong-Wolfe line search on the augmented Lagrangian.
int lbfgs(const Problem& P, std::vector<double>& z, double lx, double ly, double mu, double tol, int max_iter,
          int memory) {
    const std::size_t n = z.size();
    std::vector<double> g, theta, gn, zn, q, r, dir;
    double f = P.al(z, lx, ly, mu, g, theta);
    const auto pre = P.preconditioner(z, lx, mu);
    std::vector<std::vector<double>> S, Y;
    std::vector<double> rho;
    int it = 0;
    int failures = 0;
    for (; it < max_iter; ++it) {
        if (P.scaled_norm(g, z[n - 1]) <= tol)
            break;
        // two-loop recursion
        q = g;
        const std::size_t k = S.size();
        std::vector<double> alpha(k);
        for (std::size_t i = k; i-- > 0;) {
            alpha[i] = rho[i] * dot(S[i], q);
            for (std::size_t t = 0; t < n; ++t)
                q[t] -= alpha[i] * Y[i][t];
        }
        P.apply(pre, q, r);
        if (k > 0) {
            std::vector<double> my;
            P.apply(pre, Y[k - 1], my);
            const double gamma = dot(S[k - 1], Y[k - 1]) / dot(Y[k - 1], my);
            for (auto& v : r)
                v *= gamma;
        }
        for (std::size_t i = 0; i < k; ++i) {
            const double beta = rho[i] * dot(Y[i], r);
            for (std::size_t t = 0; t < n; ++t)
                r[t] += S[i][t] * (alpha[i] - beta);
        }
        dir.resize(n);
        for (std::size_t t = 0; t < n; ++t)
            dir[t] = -r[t];
        double d0 = dot(g, dir);
        if (!(d0 < 0.0)) {
            S.clear();
            Y.clear();
            rho.clear();
            P.apply(pre, g, r);
            for (std::size_t t = 0; t < n; ++t)
                dir[t] = -r[t];
            d0 = dot(g, dir);
            if (!(d0 < 0.0))
                break;
        }
        // cap the trial step: at most 0.5 rad per angle and 25% of the length
        double amax = 1.0;
        double big = 0.0;
        for (std::size_t t = 0; t + 1 < n; ++t)
            big = std::max(big, std::abs(dir[t]));
        if (big > 0.5)
            amax = std::min(amax, 0.5 / big);
        if (std::abs(dir[n - 1]) > 0.25 * z[n - 1])
            amax = std::min(amax, 0.25 * z[n - 1] / std::abs(dir[n - 1]));

        constexpr double c1 = 1e-4, c2 = 0.9;
        auto trial = [&](double a, double& fa, double& da) {
            zn.resize(n);
            for (std::size_t t = 0; t < n; ++t)
                zn[t] = z[t] + a * dir[t];
            fa = P.al(zn, lx, ly, mu, gn, theta);
            da = std::isfinite(fa) ? dot(gn, dir) : 0.0;
        };
        double a_prev = 0.0, f_prev = f, d_prev = d0;
        double a = amax;
        double best_a = 0.0, best_f = f;
        std::vector<double> best_z, best_g;
        bool accepted = false;
        auto keep = [&](double aa, double fa) {
            if (fa < best_f) {
                best_f = fa;
                best_a = aa;
                best_z = zn;
                best_g = gn;
            }
        };
        auto zoom = [&](double lo, double flo, double dlo, double hi, double fhi) {
            for (int zi = 0; zi < 30; ++zi) {
                double at;
                // quadratic interpolation from (lo, flo, dlo) and (hi, fhi), safeguarded
                const double den = 2.0 * (fhi - flo - dlo * (hi - lo));
                at = den > 0.0 ? lo - dlo * (hi - lo) * (hi - lo) / den : 0.5 * (lo + hi);
                const double left = std::min(lo, hi), right = std::max(lo, hi), wdt = right - left;
                if (!(at > left + 0.1 * wdt && at < right - 0.1 * wdt))
                    at = 0.5 * (lo + hi);
                double ft, dt;
                trial(at, ft, dt);
                if (!std::isfinite(ft) || ft > f + c1 * at * d0 || ft >= flo) {
                    hi = at;
                    fhi = std::isfinite(ft) ? ft : flo + 1.0;
                } else {
                    keep(at, ft);
                    if (std::abs(dt) <= -c2 * d0)
                        return true;
                    if (dt * (hi - lo) >= 0.0) {
                        hi = lo;
                        fhi = flo;
                    }
                    lo = at;
                    flo = ft;
                    dlo = dt;
                }
                if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo)))
                    break;
            }
            return false;
        };
        for (int li = 0; li < 25; ++li) {
            double fa, da;
            trial(a, fa, da);
            if (!std::isfinite(fa) || fa > f + c1 * a * d0 || (li > 0 && fa >= f_prev)) {
                accepted = zoom(a_prev, f_prev, d_prev, a, std::isfinite(fa) ? fa : f_prev + 1.0);
                break;
            }
            keep(a, fa);
            if (std::abs(da) <= -c2 * d0) {
                accepted = true;
                break;
            }
            if (da >= 0.0) {
                accepted = zoom(a, fa, da, a_prev, f_prev);
                break;
            }
            if (a >= amax)
                break;
            a_prev = a;
            f_prev = fa;
            d_prev = da;
            a = std::min(2.0 * a, amax);
        }
        if (best_a == 0.0) {
            // no decrease at double precision; restart memory once, then give up
            if (++failures > 1 || S.empty())
                break;
            S.clear();
            Y.clear();
            rho.clear();
            continue;
        }
        (void)accepted;
        failures = 0;
        std::vector<double> s(n), y(n);
        for (std::size_t t = 0; t < n; ++t) {
            s[t] = best_z[t] - z[t];
            y[t] = best_g[t] - g[t];
        }
        const double sy = dot(s, y);
        z = best_z;
        g = best_g;
        f = best_f;
        if (sy > 1e-300) {
            S.push_back(std::move(s));
            Y.push_back(std::move(y));
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > memory) {
                S.erase(S.begin());
                Y.erase(Y.begin());
                rho.erase(rho.begin());
            }
        }
    }
    return it;
}

std::vector<double> resample_angles(const DiscreteCurve& c, std::size_t N) {
    if (c.intervals() == N)
        return c.theta;
    std::vector<double> t(N + 1);
    for (std::size_t i = 0; i <= N; ++i)
        t[i] = angle_at(c, c.length * static_cast<double>(i) / static_cast<double>(N));
    t.front() = c.theta.front();
    t.back() = c.theta.back();
    return t;
}

SolveResult solve_local(const BoundaryCondition& bc, double eps, const DiscreteCurve& start,
                        const SolveOptions& opts, const std::string& label) {
    const std::size_t N = opts.N;
    const double theta_end = start.theta.back();
    Problem P(bc, eps, N, theta_end);
    DiscreteCurve init{start.length, resample_angles(start, N)};
    init.theta.front() = bc.theta0;
    if (opts.jitter > 0.0) {
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        const double a1 = U(rng), a2 = U(rng), a3 = U(rng);
        for (std::size_t i = 1; i < N; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(N);
            init.theta[i] += opts.jitter * std::sin(kPi * x) * (a1 + a2 * std::sin(2 * kPi * x) + a3 * std::cos(3 * kPi * x));
        }
    }
    std::vector<double> z = P.pack(init);
    std::vector<double> theta;
    P.unpack(z, theta);
    auto lam = P.least_squares_multipliers(theta, z[N - 1]);
    double lx = lam[0], ly = lam[1];
    double mu = opts.penalty0;

    for (int round = 0; round < opts.max_rounds; ++round) {
        const double tol = std::max(1e-7, 1e-2 * std::pow(0.1, round));
        lbfgs(P, z, lx, ly, mu, tol, opts.max_iter, opts.lbfgs_memory);
        P.unpack(z, theta);
        const auto parts = P.parts(theta, z[N - 1]);
        lx -= mu * parts.cx;
        ly -= mu * parts.cy;
        const auto res = P.residual(theta, z[N - 1], lx, ly);
        if (std::hypot(parts.cx, parts.cy) <= 1e-9 && res.stationarity <= 1e-5)
            break;
        mu *= opts.penalty_factor;
    }

    // Newton polish on the KKT system.
    P.unpack(z, theta);
    double L = z[N - 1];
    auto res = P.residual(theta, L, lx, ly);
    std::vector<double> dtheta, th_trial;
    for (int it = 0; it < opts.newton_iters; ++it) {
        if (res.stationarity <= 1e-2 * opts.grad_tol && std::hypot(res.cx, res.cy) <= 1e-2 * opts.endpoint_tol)
            break;
        // plain Newton first; regularised steps handle nearly flat directions such as a
        // loop sliding along a straight part
        bool improved = false;
        for (double shift : {0.0, 1e-4, 1e-2, 1.0}) {
            double dL, dlx, dly;
            if (!P.newton_direction(theta, L, lx, ly, res, shift, dtheta, dL, dlx, dly))
                continue;
            double step = 1.0;
            for (int bt = 0; bt < 12 && !improved; ++bt, step *= 0.5) {
                th_trial = theta;
                for (std::size_t j = 0; j + 1 < N; ++j)
                    th_trial[j + 1] += step * dtheta[j];
                const double Lt = L + step * dL;
                if (!(Lt > 0.0))
                    continue;
                auto rt = P.residual(th_trial, Lt, lx + step * dlx, ly + step * dly);
                if (rt.merit < res.merit) {
                    theta.swap(th_trial);
                    L = Lt;
                    lx += step * dlx;
                    ly += step * dly;
                    res = std::move(rt);
                    improved = true;
                }
            }
            if (improved)
                break;
        }
        if (!improved)
            break;
    }

    SolveResult out;
    out.curve.length = L;
    out.curve.theta = theta;
    auto& cert = out.cert;
    cert.eps = eps;
    cert.energy = energies(out.curve, eps);
    cert.endpoint_residual = std::hypot(res.cx, res.cy);
    cert.stationarity = res.stationarity;
    cert.lambda_x = lx;
    cert.lambda_y = ly;
    cert.elastica_residual = elastica_residual(out.curve, eps);
    cert.elastica_residual_rescaled = eps * cert.elastica_residual;
    cert.winding = winding_number(out.curve, bc);
    cert.converged = cert.stationarity <= opts.grad_tol && cert.endpoint_residual <= opts.endpoint_tol;
    cert.start = label;
    return out;
}

SolveResult segment_result(const BoundaryCondition& bc, double eps, const SolveOptions& opts) {
    SolveResult r;
    r.curve = straight_segment(bc.l, opts.N);
    r.cert.eps = eps;
    r.cert.energy = energies(r.curve, eps);
    r.cert.lambda_x = 1.0;
    r.cert.winding = 0;
    r.cert.is_global = true;
    r.cert.converged = true;
    r.cert.start = "segment";
    r.cert.starts.push_back({"segment", 0, r.cert.energy.e_eps, bc.l, 0.0, 0.0, true});
    return r;
}

struct StartSpec {
    std::string label;
    int m;
    bool reflect;
};

DiscreteCurve start_curve(const BoundaryCondition& bc, double eps, int m, bool reflect, std::size_t N) {
    int j = 0, q = m;
    double e1 = bc.theta1;
    if (reflect) {
        if (bc.theta0 != 0.0) {
            j = bc.theta0 > 0.0 ? 1 : -1;
            q = m - j;
        } else {
            const int s1 = bc.theta1 > 0.0 ? 1 : -1;
            e1 = bc.theta1 - 2.0 * kPi * s1;
            q = m + s1;
        }
    }
    try {
        return build_path(bc, eps, default_alpha(bc.l, eps), j, q, e1).sample(N);
    } catch (const std::runtime_error&) {
        // layers do not fit: fall back to a linear angle ramp of moderate excess length
        DiscreteCurve c;
        c.length = 1.3 * bc.l;
        c.theta.resize(N + 1);
        const double end = bc.theta1 + 2.0 * kPi * m;
        for (std::size_t i = 0; i <= N; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(N);
            c.theta[i] = bc.theta0 + (end - bc.theta0) * x;
        }
        return c;
    }
}

SolveResult run_starts(const BoundaryCondition& bc, double eps, const std::vector<StartSpec>& starts,
                       const SolveOptions& opts) {
    std::vector<SolveResult> results;
    for (const auto& s : starts) {
        const auto init = start_curve(bc, eps, s.m, s.reflect, opts.N);
        results.push_back(solve_local(bc, eps, init, opts, s.label));
    }
    if (results.empty())
        throw std::runtime_error("no admissible starts");
    std::size_t best = 0;
    auto better = [&](const SolveResult& a, const SolveResult& b) {
        if (a.cert.converged != b.cert.converged)
            return a.cert.converged;
        return a.cert.energy.e_eps < b.cert.energy.e_eps - 1e-12;
    };
    for (std::size_t i = 1; i < results.size(); ++i)
        if (better(results[i], results[best]))
            best = i;
    SolveResult out = results[best];
    out.cert.is_global = true;
    for (const auto& r : results)
        out.cert.starts.push_back(
            {r.cert.start, r.cert.winding, r.cert.energy.e_eps, r.curve.length, r.cert.stationarity,
             r.cert.endpoint_residual, r.cert.converged});
    // distinct curves with the same energy (non-unique minimizers)
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (i == best || !results[i].cert.converged)
            continue;
        if (std::abs(results[i].cert.energy.e_eps - out.cert.energy.e_eps) > 1e-10)
            continue;
        double diff = 0.0;
        for (std::size_t t = 0; t < out.curve.theta.size(); ++t)
            diff = std::max(diff, std::abs(results[i].curve.theta[t] - out.curve.theta[t]));
        if (diff > 1e-6) {
            if (out.cert.ties.empty()) {
                out.cert.ties.push_back(out.cert.start);
                out.cert.tie_lengths.push_back(out.curve.length);
            }
            out.cert.ties.push_back(results[i].cert.start);
            out.cert.tie_lengths.push_back(results[i].curve.length);
        }
    }
    return out;
}

std::string start_label(int m, bool reflect) {
    return "m=" + std::to_string(m) + (reflect ? "/reflected" : "");
}

bool reflection_applies(const BoundaryCondition& bc) { return bc.theta0 != 0.0 || bc.theta1 != 0.0; }

} // namespace

void SolveOptions::validate() const {
    if (N < 64)
        throw std::invalid_argument("grid must have at least 64 intervals");
    if (!(endpoint_tol > 0.0) || !(grad_tol > 0.0))
        throw std::invalid_argument("tolerances must be positive");
    if (max_iter <= 0 || max_rounds <= 0 || classes.empty())
        throw std::invalid_argument("invalid iteration limits or empty class set");
}

DiscreteCurve build_test_curve(const BoundaryCondition& bc, double eps, double alpha, std::size_t N) {
    bc.validate();
    if (!(eps > 0.0) || !(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("test curve needs eps > 0 and alpha in (0, 1)");
    if (bc.theta0 == 0.0 && bc.theta1 == 0.0)
        return straight_segment(bc.l, N);
    if (!(std::pow(eps, alpha) < bc.l))
        throw std::invalid_argument("test curve needs eps^alpha < l");
    return build_path(bc, eps, alpha, 0, 0, bc.theta1).sample(N);
}

SolveResult minimize_extensible(const BoundaryCondition& bc, double eps, const SolveOptions& opts) {
    bc.validate();
    opts.validate();
    if (!(eps > 0.0))
        throw std::invalid_argument("eps must be positive");
    if (bc.theta0 == 0.0 && bc.theta1 == 0.0)
        return segment_result(bc, eps, opts);
    std::vector<StartSpec> starts;
    for (int m : opts.classes) {
        starts.push_back({start_label(m, false), m, false});
        if (opts.reflections && reflection_applies(bc))
            starts.push_back({start_label(m, true), m, true});
    }
    SolveResult out = run_starts(bc, eps, starts, opts);
    const double v0 = weighted_variation(bc.theta0), e = out.cert.energy.e_eps;
    for (int m = -64; m <= 64; ++m) {
        if (std::find(opts.classes.begin(), opts.classes.end(), m) != opts.classes.end())
            continue;
        const double bound = bc.l + eps * std::abs(weighted_variation(bc.theta1 + 2.0 * std::numbers::pi * m) - v0);
        if (bound < e)
            out.cert.unexcluded_classes.push_back(m);
    }
    if (!out.cert.unexcluded_classes.empty())
        out.cert.is_global = false;
    return out;
}

SolveResult minimize_in_winding_class(const BoundaryCondition& bc, double eps, int m,
                                      const SolveOptions& opts) {
    bc.validate();
    opts.validate();
    if (!(eps > 0.0))
        throw std::invalid_argument("eps must be positive");
    if (bc.theta0 == 0.0 && bc.theta1 == 0.0 && m == 0)
        return segment_result(bc, eps, opts);
    std::vector<StartSpec> starts{{start_label(m, false), m, false}};
    if (opts.reflections && reflection_applies(bc))
        starts.push_back({start_label(m, true), m, true});
    auto r = run_starts(bc, eps, starts, opts);
    if (r.cert.winding != m)
        throw std::runtime_error("winding class escaped during optimization");
    return r;
}

SolveResult minimize_from(const BoundaryCondition& bc, double eps, const DiscreteCurve& start,
                          const SolveOptions& opts) {
    bc.validate();
    opts.validate();
    if (!(eps > 0.0))
        throw std::invalid_argument("eps must be positive");
    auto r = solve_local(bc, eps, start, opts, "warm");
    r.cert.starts.push_back({"warm", r.cert.winding, r.cert.energy.e_eps, r.curve.length, r.cert.stationarity,
                             r.cert.endpoint_residual, r.cert.converged});
    return r;
}

double elastica_residual(const DiscreteCurve& curve, double eps) {
    const auto k = curvature(curve);
    const std::size_t N = curve.intervals();
    const double h = curve.step();
    double m = 0.0;
    for (std::size_t i = 2; i + 2 <= N; ++i) {
        const double kk = (k[i + 1] - 2.0 * k[i] + k[i - 1]) / (h * h);
        m = std::max(m, std::abs(eps * eps * (2.0 * kk + k[i] * k[i] * k[i]) - k[i]));
    }
    return m;
}

double stationarity_residual(const DiscreteCurve& curve, const BoundaryCondition& bc, double eps) {
    Problem P(bc, eps, curve.intervals(), curve.theta.back());
    std::vector<double> theta = curve.theta;
    theta.front() = bc.theta0;
    const auto lam = P.least_squares_multipliers(theta, curve.length);
    return P.residual(theta, curve.length, lam[0], lam[1]).stationarity;
}

double discrete_augmented_lagrangian(const BoundaryCondition& bc, double eps, const std::vector<double>& z, double lx,
                                     double ly, double mu, std::vector<double>& grad) {
    if (z.size() < 2)
        throw std::invalid_argument("discrete_augmented_lagrangian: need at least one interior node");
    Problem P(bc, eps, z.size(), bc.theta1);
    std::vector<double> theta;
    return P.al(z, lx, ly, mu, grad, theta);
}

nlohmann::json to_json(const MinimizerCertificate& c) {
    nlohmann::json starts = nlohmann::json::array();
    for (const auto& s : c.starts)
        starts.push_back({{"label", s.label},
                          {"winding", s.winding},
                          {"e_eps", s.e_eps},
                          {"length", s.length},
                          {"stationarity", s.stationarity},
                          {"endpoint_residual", s.endpoint_residual},
                          {"converged", s.converged}});
    return {{"eps", c.eps},
            {"energy", to_json(c.energy)},
            {"endpoint_residual", c.endpoint_residual},
            {"stationarity", c.stationarity},
            {"elastica_residual", c.elastica_residual},
            {"elastica_residual_rescaled", c.elastica_residual_rescaled},
            {"lambda", {c.lambda_x, c.lambda_y}},
            {"winding", c.winding},
            {"is_global", c.is_global},
            {"converged", c.converged},
            {"start", c.start},
            {"starts", starts},
            {"ties", c.ties},
            {"tie_lengths", c.tie_lengths},
            {"unexcluded_classes", c.unexcluded_classes}};
}

} // namespace elastica
