// Acceptance runs at N = 4096. Prints one PASS/FAIL line per criterion plus the measured
// numbers behind it. Exit status is nonzero if any selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "elastica/borderline.hpp"
#include "elastica/convex.hpp"
#include "elastica/diagnostics.hpp"
#include "elastica/elliptic.hpp"
#include "elastica/extensible.hpp"
#include "elastica/geometry.hpp"
#include "elastica/inextensible.hpp"

using namespace elastica;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double s2 = std::numbers::sqrt2;
const std::vector<double> kEps{0.08, 0.04, 0.02, 0.01};
const std::vector<double> kSchedule{0.20, 0.12, 0.06, 0.04};
const BoundaryCondition kOpposite{1.0, pi / 2, -pi / 2};
const BoundaryCondition kParallel{1.0, pi / 2, pi / 2};

struct Check {
    bool ok = true;
    [[gnu::format(printf, 3, 4)]] void operator()(bool cond, const char* fmt, ...) {
        std::printf("  [%s] ", cond ? "ok" : "FAIL");
        va_list ap;
        va_start(ap, fmt);
        std::vprintf(fmt, ap);
        va_end(ap);
        std::printf("\n");
        ok = ok && cond;
    }
};

template <class F>
void parallel(std::size_t n, F&& f) {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i)
        pool.emplace_back([&, i] { f(i); });
    for (auto& t : pool)
        t.join();
}

std::vector<SolveResult> solve_sweep(const BoundaryCondition& bc, const std::vector<double>& eps) {
    std::vector<SolveResult> out(eps.size());
    parallel(eps.size(), [&](std::size_t i) { out[i] = minimize_extensible(bc, eps[i]); });
    return out;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1]))
            return false;
    return true;
}

bool sweep_gaps(Check& check, const std::vector<SolveResult>& sols, double target, bool use_length) {
    std::vector<double> gaps;
    for (std::size_t i = 0; i < kEps.size(); ++i) {
        const auto& c = sols[i].cert;
        const double v = use_length ? (sols[i].curve.length - 1.0) / kEps[i] : (c.energy.e_eps - 1.0) / kEps[i];
        const double gap = std::abs(v - target) / target;
        gaps.push_back(gap);
        check(gap <= kSchedule[i], "eps=%.2f ratio=%.7f gap=%.3e (limit %.2f)", kEps[i], v, gap, kSchedule[i]);
        check(c.converged, "eps=%.2f solver converged, endpoint residual %.1e", kEps[i], c.endpoint_residual);
    }
    check(strictly_decreasing(gaps), "gap strictly decreasing: %.3e %.3e %.3e %.3e", gaps[0], gaps[1], gaps[2],
          gaps[3]);
    return check.ok;
}

bool criterion1() {
    Check check;
    const auto sols = solve_sweep(kOpposite, kEps);
    return sweep_gaps(check, sols, 8 * s2 * 2 * std::pow(std::sin(pi / 8), 2), false);
}

bool criterion2() {
    Check check;
    const auto sols = solve_sweep(kOpposite, kEps);
    sweep_gaps(check, sols, length_coefficient(pi / 2, -pi / 2), true);
    const auto& s = sols.back();
    const double eps = kEps.back();
    const double X = eps * s.cert.energy.bending, Y = (s.curve.length - 1.0) / eps;
    const double r = std::abs(X - Y) / ((s.cert.energy.e_eps - 1.0) / eps);
    check(r <= 0.1, "eps=0.01 X=%.7f Y=%.7f |X-Y|/((E-l)/eps)=%.3e (limit 0.1)", X, Y, r);
    return check.ok;
}

bool criterion3() {
    Check check;
    const auto sols = solve_sweep(kOpposite, kEps);
    std::vector<double> dev;
    for (std::size_t i = 0; i < kEps.size(); ++i) {
        dev.push_back(rescaled_deviation(sols[i].curve, kEps[i], pi / 2, 10.0).c0);
        std::printf("  eps=%.2f rescaled C0 deviation (c=10) %.3e\n", kEps[i], dev.back());
    }
    bool mono = true;
    for (std::size_t i = 1; i < dev.size(); ++i)
        mono = mono && dev[i] <= 1.1 * dev[i - 1];
    check(mono, "deviation decreasing along eps with 10%% allowance");
    check(dev.back() <= 0.05, "eps=0.01 C0 deviation %.3e (limit 0.05)", dev.back());
    const double kh = kEps.back() * curvature(sols.back().curve).front();
    check(std::abs(kh + 1.0) <= 0.05, "eps=0.01 rescaled curvature at 0: %.6f (target -1 +- 0.05)", kh);
    return check.ok;
}

bool criterion4() {
    Check check;
    const double eps = 0.01;
    const auto s = minimize_extensible(kOpposite, eps);
    for (double c : {5.0, 8.0}) {
        const double v = straightness_profile(s.curve, eps, c), bound = 1.25 * 4 * std::exp(-c / s2);
        check(v <= bound, "c=%g straightness %.4e (limit %.4e)", c, v, bound);
    }
    return check.ok;
}

bool criterion5() {
    Check check;
    const std::vector<double> eps{0.02, 0.01};
    const auto opp = solve_sweep(kOpposite, eps), par = solve_sweep(kParallel, eps);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const int n0 = count_inflections(opp[i].curve), n1 = count_inflections(par[i].curve);
        const double tv = total_angle_variation(opp[i].curve);
        check(n0 == 0, "eps=%.2f (pi/2,-pi/2): %d inflections", eps[i], n0);
        check(!has_self_intersection(opp[i].curve), "eps=%.2f (pi/2,-pi/2): no self-intersection", eps[i]);
        check(std::abs(tv - pi) <= 1e-3, "eps=%.2f (pi/2,-pi/2): total angle variation %.6f (target pi +- 1e-3)",
              eps[i], tv);
        check(n1 == 1, "eps=%.2f (pi/2,pi/2): %d inflections", eps[i], n1);
        check(!has_self_intersection(par[i].curve), "eps=%.2f (pi/2,pi/2): no self-intersection", eps[i]);
    }
    return check.ok;
}

bool criterion6() {
    Check check;
    const std::vector<double> eps{0.05, 0.02};
    const auto sols = solve_sweep(kOpposite, eps);
    ConvexOptions other;
    other.a0 = 0.5;
    other.b0 = 0.1;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const auto p = solve_convex(kOpposite, eps[i]);
        const auto q = solve_convex(kOpposite, eps[i], other);
        const double ec = convex_energy(p), eg = sols[i].cert.energy.e_eps;
        const double rel = std::abs(ec - eg) / eg;
        check(rel <= 1e-5, "eps=%.2f convex %.10f general %.10f rel %.2e (limit 1e-5)", eps[i], ec, eg, rel);
        double dev = 0.0;
        for (std::size_t j = 0; j < p.phi.size(); ++j)
            dev = std::max(dev, std::abs(rho_at(q, p.phi[j]) - p.rho[j]) / p.rho[j]);
        check(dev <= 1e-10, "eps=%.2f rho from two Newton starts: sup rel diff %.2e (limit 1e-10)", eps[i], dev);
    }
    return check.ok;
}

bool criterion7() {
    Check check;
    const std::vector<double> ls{0.90, 0.95, 0.98, 0.99};
    const auto rows = straightening_sweep(1.0, pi / 2, -pi / 2, ls, {}, 1e-10, 4);
    const double c = length_coefficient(pi / 2, -pi / 2);
    std::vector<double> et, gaps;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double gap = std::abs(rows[i].ratio - c) / c;
        et.push_back(rows[i].eps_tilde);
        gaps.push_back(gap);
        check(rows[i].attained && gap <= kSchedule[i], "l=%.2f eps_tilde=%.7f (L-l)/eps=%.7f gap=%.3e (limit %.2f)",
              ls[i], rows[i].eps_tilde, rows[i].ratio, gap, kSchedule[i]);
    }
    check(strictly_decreasing(et), "eps_tilde strictly decreasing in l");
    check(strictly_decreasing(gaps), "gap strictly decreasing: %.3e %.3e %.3e %.3e", gaps[0], gaps[1], gaps[2],
          gaps[3]);
    // dictionary: the extensible minimizer at (l, eps_tilde) has length L
    std::vector<double> len(ls.size());
    parallel(ls.size(), [&](std::size_t i) {
        len[i] = length_of_min(BoundaryCondition{ls[i], pi / 2, -pi / 2}, rows[i].eps_tilde).length;
    });
    double worst = 0.0;
    for (double v : len)
        worst = std::max(worst, std::abs(v - 1.0));
    check(worst <= 1e-8, "dictionary |L~_l(eps_tilde) - L| max %.2e (limit 1e-8)", worst);
    return check.ok;
}

bool criterion8() {
    Check check;
    const BoundaryCondition flat{1.0, 0.0, 0.0};
    const auto seg = minimize_in_winding_class(flat, 0.05, 0);
    const auto loop = minimize_in_winding_class(flat, 0.05, 1);
    check(loop.cert.converged, "m=1 converged, stationarity %.2e, endpoint residual %.2e", loop.cert.stationarity,
          loop.cert.endpoint_residual);
    check(loop.cert.winding == 1 && winding_number(loop.curve, flat) == 1, "winding class preserved (m=%d)",
          winding_number(loop.curve, flat));
    check(loop.cert.energy.e_eps > seg.cert.energy.e_eps, "E(m=1)=%.8f > E(m=0)=%.8f", loop.cert.energy.e_eps,
          seg.cert.energy.e_eps);
    check(has_self_intersection(loop.curve) || total_angle_variation(loop.curve) > pi, "curve carries a loop");
    return check.ok;
}

DiscreteCurve random_curve(std::mt19937_64& rng, std::size_t N) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    DiscreteCurve c;
    c.length = 1.0 + 0.5 * (U(rng) + 1.0);
    double a[5], b[5];
    for (int j = 0; j < 5; ++j) {
        a[j] = 1.5 * U(rng) / (j + 1);
        b[j] = 1.5 * U(rng) / (j + 1);
    }
    const double c0 = 2.0 * U(rng);
    c.theta.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(N);
        double t = c0;
        for (int j = 0; j < 5; ++j)
            t += a[j] * std::cos((j + 1) * x * pi) + b[j] * std::sin((j + 1) * x * pi);
        c.theta[i] = t;
    }
    return c;
}

bool criterion9() {
    Check check;
    // elliptic functions
    double ident = 0.0, deriv = 0.0, period = 0.0;
    const double h = 1e-5;
    for (double k : {0.0, 0.3, 1 / s2, 0.95, 1.0})
        for (double x = -20.0; x <= 20.0; x += 0.37) {
            const auto t = jacobi(x, k);
            ident = std::max({ident, std::abs(t.sn * t.sn + t.cn * t.cn - 1), std::abs(t.dn * t.dn + k * k * t.sn * t.sn - 1)});
            const auto p = jacobi(x + h, k), m = jacobi(x - h, k);
            deriv = std::max({deriv, std::abs((p.sn - m.sn) / (2 * h) - t.cn * t.dn),
                              std::abs((p.cn - m.cn) / (2 * h) + t.sn * t.dn),
                              std::abs((p.dn - m.dn) / (2 * h) + k * k * t.sn * t.cn)});
            if (k < 1.0) {
                const auto s = jacobi(x + 2 * ellint_K(k), k);
                period = std::max({period, std::abs(s.sn + t.sn), std::abs(s.cn + t.cn), std::abs(s.dn - t.dn)});
            }
        }
    check(ident <= 1e-12, "elliptic identities max %.1e", ident);
    check(deriv <= 1e-8, "elliptic derivatives max %.1e", deriv);
    check(period <= 1e-10, "elliptic half-period antisymmetry max %.1e", period);

    // borderline layer
    double ode = 0.0, pos = 0.0;
    for (double th : {pi, pi / 2, -2.0}) {
        const auto B = make_borderline(th);
        for (double s = h; s <= 30.0; s += 0.173) {
            const double d = (borderline_angle(B, s + h) - borderline_angle(B, s - h)) / (2 * h);
            ode = std::max(ode, std::abs(d * d - (1 - std::cos(borderline_angle(B, s)))));
        }
        const std::size_t n = 4096;
        const auto pts = reconstruct_positions(sample_borderline(B, 30.0, n));
        for (std::size_t i = 0; i <= n; ++i) {
            const auto q = borderline_point(B, 30.0 * i / n);
            pos = std::max(pos, std::hypot(q[0] - pts[i][0], q[1] - pts[i][1]));
        }
    }
    check(ode <= 1e-10, "borderline ODE residual max %.1e", ode);
    check(pos <= 5 * std::pow(30.0 / 4096, 2), "borderline positions vs explicit formula max %.1e", pos);

    // F additivity and the V lower bound
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> E(0.01, 1.0);
    double add = 0.0, slack = 1e300;
    for (int t = 0; t < 50; ++t) {
        const auto c = random_curve(rng, 4096);
        const double eps = E(rng);
        const auto k = curvature(c);
        const double whole = f_eps_range(c, k, eps, 0, 4096);
        const double parts = f_eps_range(c, k, eps, 0, 1000) + f_eps_range(c, k, eps, 1000, 2731) +
                             f_eps_range(c, k, eps, 2731, 4096);
        add = std::max(add, std::abs(parts - whole) / whole);
        slack = std::min(slack, whole - std::abs(weighted_variation(c.theta.back()) - weighted_variation(c.theta.front())));
    }
    check(add <= 1e-13, "F additivity over partitions, 50 curves: max rel %.1e", add);
    check(slack >= -1e-6, "F >= |V(end) - V(start)|, 50 curves: min slack %.3e", slack);

    // dilation
    const auto c = random_curve(rng, 2048);
    const auto back = dilate(dilate(c, 2.0), 0.5);
    const double b1 = energies(c, 1.0).bending, b2 = energies(dilate(c, 2.0), 1.0).bending;
    check(back.theta == c.theta && std::abs(back.length - c.length) <= 1e-15 * c.length, "dilation round trip");
    check(std::abs(b2 - b1 / 2) <= 1e-12 * b1, "B[2 gamma] = B/2: %.12f vs %.12f", b2, b1 / 2);

    // S-shape cut
    const auto g = synth_inflection_graph(0.5, 4096);
    for (double frac : {0.125, 0.25, 0.5}) {
        const auto r = sshape_perturb(g, frac * g.r, 0.1);
        check(r.energy_after < r.energy_before, "S-shape delta=r*%.3f: %.6f -> %.6f", frac, r.energy_before,
              r.energy_after);
    }
    return check.ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance runs"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<bool()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9};
    const char* names[] = {"energy expansion",     "length expansion",   "rescaled convergence",
                           "straightness",         "qualitative counts", "uniqueness / convex solver",
                           "inextensible sweep",   "looped local minimizer", "property suites"};
    int failed = 0;
    for (int i = 1; i <= 9; ++i) {
        if (only != 0 && only != i)
            continue;
        std::printf("criterion %d: %s\n", i, names[i - 1]);
        std::fflush(stdout);
        const auto t0 = std::chrono::steady_clock::now();
        const bool ok = all[i - 1]();
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d (%s) %.1fs\n", ok ? "PASS" : "FAIL", i, names[i - 1], sec);
        std::fflush(stdout);
        failed += ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
