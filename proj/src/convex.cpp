#include "elastica/convex.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace elastica {

namespace {

struct Eval {
    double gx = 0.0, gy = 0.0;  // constraint residuals
    double j[2][2]{};           // d(gx, gy) / d(psi, eta)
    bool positive = true;
};

// Nodes clustered at the radicand minimum; peak half-width is sqrt(2 mu / (1 - mu)).
AngleGrid make_grid(double lo, double hi, double psi, double mu, std::size_t M) {
    AngleGrid g;
    g.M = M;
    g.graded = true;
    g.center = std::clamp(psi, lo, hi);
    const double R = 1.0 - mu;
    g.scale = std::min(std::sqrt(2.0 * mu / std::max(R, 1e-300)), 1e3);
    const double ua = std::asinh((lo - g.center) / g.scale);
    const double ub = std::asinh((hi - g.center) / g.scale);
    g.u0 = ua;
    g.du = (ub - ua) / static_cast<double>(M);
    return g;
}

// Offsets phi - psi are formed from the map directly so that sub-ulp clustering near psi
// is not lost when phi itself is rounded.
void fill_profile(RhoProfile& p, std::size_t M, Eval* ev) {
    const double lo = p.lo(), hi = p.hi();
    p.grid = make_grid(lo, hi, p.psi, p.mu, M);
    const auto& g = p.grid;
    p.phi.resize(M + 1);
    p.rho.resize(M + 1);
    p.weight.resize(M + 1);
    Eval e;
    const double R = 1.0 - p.mu;
    for (std::size_t i = 0; i <= M; ++i) {
        const double u = g.u(i);
        const double off = g.scale * std::sinh(u);
        const double delta = (g.center - p.psi) + off;
        double phi = g.center + off;
        if (i == 0)
            phi = lo;
        if (i == M)
            phi = hi;
        p.phi[i] = phi;
        const double sh = std::sin(0.5 * delta);
        const double r = p.mu + 2.0 * R * sh * sh;
        if (!(r > 0.0))
            e.positive = false;
        const double rho = p.eps / std::sqrt(r);
        p.rho[i] = rho;
        const double w = g.du * g.dphi_du(u) * ((i == 0 || i == M) ? 0.5 : 1.0);
        p.weight[i] = w;
        const double c = std::cos(phi), s = std::sin(phi);
        e.gx += w * rho * c;
        e.gy += w * rho * s;
        if (ev) {
            const double drho_dpsi = rho * R * std::sin(delta) / (2.0 * r);
            const double drho_deta = -p.mu * rho * std::cos(delta) / (2.0 * r);
            e.j[0][0] += w * drho_dpsi * c;
            e.j[0][1] += w * drho_deta * c;
            e.j[1][0] += w * drho_dpsi * s;
            e.j[1][1] += w * drho_deta * s;
        }
    }
    e.gx -= p.l;
    p.a = -R * std::cos(p.psi);
    p.b = -R * std::sin(p.psi) + 0.0;  // no negative zero
    if (ev)
        *ev = e;
}

} // namespace

double rho_at(const RhoProfile& p, double phi) {
    const double sh = std::sin(0.5 * (phi - p.psi));
    return p.eps / std::sqrt(p.mu + 2.0 * (1.0 - p.mu) * sh * sh);
}

double AngleGrid::phi_of_u(double uu) const { return graded ? center + scale * std::sinh(uu) : center + uu; }

double AngleGrid::dphi_du(double uu) const { return graded ? scale * std::cosh(uu) : 1.0; }

RhoProfile solve_convex(const BoundaryCondition& bc, double eps, const ConvexOptions& opts) {
    bc.validate();
    if (!(eps > 0.0))
        throw std::invalid_argument("solve_convex: eps must be positive");
    if (bc.theta0 == bc.theta1)
        throw std::invalid_argument("solve_convex: needs theta0 != theta1");
    if (opts.M < 8)
        throw std::invalid_argument("solve_convex: grid too small");
    RhoProfile p;
    p.theta0 = bc.theta0;
    p.theta1 = bc.theta1;
    p.eps = eps;
    p.l = bc.l;
    const double R0 = std::hypot(opts.a0, opts.b0);
    if (R0 >= 1.0)
        throw std::invalid_argument("solve_convex: Newton start must have a^2 + b^2 < 1");
    // mu = 1 makes the psi-direction degenerate; start just inside
    p.mu = std::min(1.0 - R0, 1.0 - 1e-3);
    p.psi = R0 > 0.0 ? std::atan2(-opts.b0, -opts.a0) : 0.5 * (bc.theta0 + bc.theta1);
    // theta1 = -theta0: rho is even, so b = 0 and psi = 0 exactly
    const bool symmetric = bc.theta1 == -bc.theta0;
    if (symmetric)
        p.psi = 0.0;
    double eta = std::log(p.mu);

    Eval e;
    fill_profile(p, opts.M, &e);
    auto norm = [](const Eval& v) { return std::hypot(v.gx, v.gy); };
    for (int step = 0; step < opts.max_steps; ++step) {
        p.newton_steps = step;
        if (e.positive && norm(e) <= opts.tol * std::max(1.0, bc.l))
            return p;
        if (symmetric && !(std::abs(e.j[0][1]) > 0.0))
            throw std::runtime_error("solve_convex: singular Newton system");
        const double det = e.j[0][0] * e.j[1][1] - e.j[0][1] * e.j[1][0];
        if (!symmetric && (!(std::abs(det) > 0.0) || !std::isfinite(det)))
            throw std::runtime_error("solve_convex: singular Newton system");
        double dpsi = -(e.j[1][1] * e.gx - e.j[0][1] * e.gy) / det;
        double deta = -(-e.j[1][0] * e.gx + e.j[0][0] * e.gy) / det;
        if (symmetric) {
            dpsi = 0.0;
            deta = -e.gx / e.j[0][1];
        }
        const double cap = std::max(std::abs(dpsi) / 0.5, std::abs(deta) / 4.0);
        if (cap > 1.0) {
            dpsi /= cap;
            deta /= cap;
        }
        const double psi0 = p.psi, eta0 = eta, n0 = norm(e);
        bool accepted = false;
        for (double t = 1.0; t > 1e-6; t *= 0.5) {
            p.psi = psi0 + t * dpsi;
            eta = std::min(eta0 + t * deta, -1e-12);
            p.mu = std::exp(eta);
            Eval trial;
            fill_profile(p, opts.M, &trial);
            if (trial.positive && norm(trial) < n0) {
                e = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            p.psi = psi0;
            eta = eta0;
            p.mu = std::exp(eta);
            fill_profile(p, opts.M, &e);
            if (e.positive && norm(e) <= 1e-10 * std::max(1.0, bc.l))
                return p;
            throw std::runtime_error("solve_convex: damped Newton stalled");
        }
    }
    if (e.positive && norm(e) <= 1e-10 * std::max(1.0, bc.l))
        return p;
    throw std::runtime_error("solve_convex: Newton did not converge in the step limit");
}

RhoProfile make_rho_profile(double theta0, double theta1, double eps, const std::vector<double>& rho_uniform) {
    if (rho_uniform.size() < 3 || theta0 == theta1)
        throw std::invalid_argument("make_rho_profile: need >= 3 samples and theta0 != theta1");
    RhoProfile p;
    p.theta0 = theta0;
    p.theta1 = theta1;
    p.eps = eps;
    const std::size_t M = rho_uniform.size() - 1;
    p.grid.graded = false;
    p.grid.center = p.lo();
    p.grid.u0 = 0.0;
    p.grid.du = (p.hi() - p.lo()) / static_cast<double>(M);
    p.grid.M = M;
    p.rho = rho_uniform;
    p.phi.resize(M + 1);
    p.weight.resize(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
        p.phi[i] = p.lo() + p.grid.du * static_cast<double>(i);
        p.weight[i] = p.grid.du * ((i == 0 || i == M) ? 0.5 : 1.0);
    }
    p.phi[M] = p.hi();
    const auto d = convex_displacement(p);
    p.l = d[0];
    return p;
}

double convex_energy(const RhoProfile& p, const std::vector<double>& rho) {
    double e = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
        e += p.weight[i] * (p.eps * p.eps / rho[i] + rho[i]);
    return e;
}

double convex_energy(const RhoProfile& p) { return convex_energy(p, p.rho); }

std::array<double, 2> convex_displacement(const RhoProfile& p) {
    double x = 0.0, y = 0.0;
    for (std::size_t i = 0; i < p.rho.size(); ++i) {
        x += p.weight[i] * p.rho[i] * std::cos(p.phi[i]);
        y += p.weight[i] * p.rho[i] * std::sin(p.phi[i]);
    }
    return {x, y};
}

DiscreteCurve rho_to_curve(const RhoProfile& p, std::size_t N) {
    if (N < 2)
        throw std::invalid_argument("rho_to_curve: N must be >= 2");
    const auto& g = p.grid;
    const std::size_t M = g.M;
    // f(u) = rho(phi(u)) phi'(u) = ds/du; cumulative arc length by end-corrected trapezoid
    std::vector<double> f(M + 1), fp(M + 1), S(M + 1, 0.0);
    for (std::size_t i = 0; i <= M; ++i)
        f[i] = p.rho[i] * g.dphi_du(g.u(i));
    fp = differentiate(f, g.du);
    for (std::size_t i = 0; i < M; ++i)
        S[i + 1] = S[i] + 0.5 * g.du * (f[i] + f[i + 1]) + g.du * g.du / 12.0 * (fp[i] - fp[i + 1]);
    const double L = S[M];
    const bool descending = p.theta0 > p.theta1;  // arc length runs from theta0

    DiscreteCurve c;
    c.length = L;
    c.theta.resize(N + 1);
    std::size_t cell = 0;
    for (std::size_t k = 0; k <= N; ++k) {
        const double s = L * static_cast<double>(k) / static_cast<double>(N);
        const double target = descending ? L - s : s;
        // cells are monotone in S; locate by bisection
        std::size_t a = 0, b = M;
        while (b - a > 1) {
            const std::size_t mid = (a + b) / 2;
            if (S[mid] <= target)
                a = mid;
            else
                b = mid;
        }
        cell = a;
        const double h = S[cell + 1] - S[cell];
        const double t = h > 0.0 ? std::clamp((target - S[cell]) / h, 0.0, 1.0) : 0.0;
        // cubic Hermite for u(S) with du/dS = 1/f
        const double u0 = g.u(cell), u1 = g.u(cell + 1);
        const double m0 = h / f[cell], m1 = h / f[cell + 1];
        const double t2 = t * t, t3 = t2 * t;
        const double uu = (2 * t3 - 3 * t2 + 1) * u0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * u1 +
                          (t3 - t2) * m1;
        c.theta[k] = std::clamp(g.phi_of_u(uu), p.lo(), p.hi());
    }
    c.theta.front() = p.theta0;
    c.theta.back() = p.theta1;
    return c;
}

nlohmann::json to_json(const RhoProfile& p) {
    return {{"theta0", p.theta0}, {"theta1", p.theta1}, {"a", p.a},     {"b", p.b},
            {"mu", p.mu},         {"psi", p.psi},       {"eps", p.eps}, {"l", p.l},
            {"phi", p.phi},       {"rho", p.rho}};
}

} // namespace elastica
