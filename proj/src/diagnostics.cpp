#include "elastica/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "elastica/borderline.hpp"
#include "elastica/elliptic.hpp"

namespace elastica {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kCnMaxKc = 1.0 / kSqrt2 - 1e-9;

double modulus_from_kc(double kc) { return std::sqrt((1.0 - kc) * (1.0 + kc)); }

// Parameter relations of the two elliptic families, expressed through kc.
void set_family_params(ElasticaFit& f, double kc, double sign) {
    f.kc = kc;
    f.k = modulus_from_kc(kc);
    if (f.family == Family::Cn) {
        f.alpha = 1.0 / (f.eps * std::sqrt(2.0 * (1.0 - 2.0 * kc * kc)));
        f.A = sign * 2.0 * f.k * f.alpha;
    } else {
        f.alpha = 1.0 / (f.eps * std::sqrt(2.0 * (1.0 + kc * kc)));
        f.A = sign * 2.0 * f.alpha;
    }
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

double fit_sse(const ElasticaFit& f, const std::vector<double>& kappa, double h, double* maxres = nullptr) {
    double sse = 0.0, mr = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        const double r = kappa[i] - fit_curvature(f, h * static_cast<double>(i));
        sse += r * r;
        mr = std::max(mr, std::abs(r));
    }
    if (maxres)
        *maxres = mr;
    return sse;
}

// Initial guess from the first integral at the anchor, then Levenberg-Marquardt in (ln kc, beta).
ElasticaFit fit_family(Family fam, const std::vector<double>& kappa, const std::vector<double>& dkappa, double h,
                       double eps) {
    std::size_t anchor = 0;
    for (std::size_t i = 0; i < kappa.size(); ++i)
        if (std::abs(kappa[i]) > std::abs(kappa[anchor]))
            anchor = i;
    const double a0 = kappa[anchor], b0 = dkappa[anchor];
    const double sign = a0 >= 0.0 ? 1.0 : -1.0;
    const double ie2 = 1.0 / (eps * eps);
    const double C = b0 * b0 + 0.25 * a0 * a0 * a0 * a0 - 0.5 * a0 * a0 * ie2;
    const double A2 = ie2 + std::sqrt(std::max(ie2 * ie2 + 4.0 * C, 0.0));

    ElasticaFit f;
    f.family = fam;
    f.eps = eps;
    const double qmax = std::log(fam == Family::Cn ? kCnMaxKc : 1.0);
    const double qmin = -80.0;

    // phase at the anchor from the inverse function; for w0 in [0, K] the derivative has sign -sign(A)
    auto phase_for = [&](ElasticaFit& g, bool flip) {
        const double ratio = std::clamp(a0 / g.A, -1.0, 1.0);
        double snabs = std::sqrt(std::max(0.0, (1.0 - ratio) * (1.0 + ratio)));
        if (fam == Family::Dn)
            snabs = g.k > 0.0 ? snabs / g.k : 0.0;
        snabs = std::min(snabs, 1.0);
        double w0 = ellint_F(snabs, g.k);
        if (flip)
            w0 = -w0;
        g.beta = w0 - g.alpha * h * static_cast<double>(anchor);
    };

    // the first integral fixes kc only when it is not exponentially small, so scan ln kc as well
    double kc2;
    if (fam == Family::Cn) {
        const double al2 = 0.5 * (A2 - ie2);
        kc2 = al2 > 0.0 ? (A2 - 2.0 * ie2) / (4.0 * al2) : 0.25;
    } else {
        kc2 = (2.0 * ie2 - A2) / A2;
    }
    std::vector<double> qs;
    if (kc2 > 0.0)
        qs.push_back(std::clamp(0.5 * std::log(kc2), qmin, qmax));
    for (double q = qmax; q > -60.0; q -= 0.25)
        qs.push_back(q);
    double best = std::numeric_limits<double>::infinity();
    for (double q : qs) {
        for (bool flip : {false, true}) {
            ElasticaFit g = f;
            set_family_params(g, std::exp(q), sign);
            phase_for(g, flip);
            const double e = fit_sse(g, kappa, h);
            if (e < best) {
                best = e;
                f = g;
            }
        }
    }

    double q = std::log(f.kc);
    double sse = fit_sse(f, kappa, h);
    double lam = 1e-3;
    const std::size_t n = kappa.size();
    std::vector<double> m0(n), mq(n), mb(n);
    for (int it = 0; it < 100; ++it) {
        const double dq = 1e-6, db = 1e-7;
        ElasticaFit fq = f, fb = f;
        const double qq = std::min(q + dq, qmax) == q ? q - dq : q + dq;
        set_family_params(fq, std::exp(qq), sign);
        fb.beta = f.beta + db;
        double jqq = 0, jqb = 0, jbb = 0, gq = 0, gb = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = h * static_cast<double>(i);
            const double base = fit_curvature(f, s);
            const double r = kappa[i] - base;
            const double Jq = (fit_curvature(fq, s) - base) / (qq - q);
            const double Jb = (fit_curvature(fb, s) - base) / db;
            jqq += Jq * Jq;
            jqb += Jq * Jb;
            jbb += Jb * Jb;
            gq += Jq * r;
            gb += Jb * r;
        }
        bool improved = false;
        for (int tries = 0; tries < 12; ++tries) {
            const double a11 = jqq * (1.0 + lam), a22 = jbb * (1.0 + lam), a12 = jqb;
            const double det = a11 * a22 - a12 * a12;
            if (!(det > 0.0)) {
                lam *= 10.0;
                continue;
            }
            const double stq = (a22 * gq - a12 * gb) / det;
            const double stb = (a11 * gb - a12 * gq) / det;
            const double qn = std::clamp(q + stq, qmin, qmax);
            ElasticaFit ft = f;
            set_family_params(ft, std::exp(qn), sign);
            ft.beta = f.beta + stb;
            const double st = fit_sse(ft, kappa, h);
            if (st < sse) {
                const double rel = (sse - st) / std::max(sse, 1e-300);
                f = ft;
                q = qn;
                sse = st;
                lam = std::max(lam * 0.3, 1e-12);
                improved = rel > 1e-14;
                break;
            }
            lam *= 10.0;
        }
        if (!improved)
            break;
    }
    fit_sse(f, kappa, h, &f.residual);
    return f;
}

} // namespace

std::string family_name(Family f) {
    switch (f) {
    case Family::Cn:
        return "cn";
    case Family::Dn:
        return "dn";
    case Family::Line:
        return "line";
    }
    return "?";
}

double fit_curvature(const ElasticaFit& f, double s) {
    if (f.family == Family::Line)
        return 0.0;
    const auto t = jacobi_kc(f.alpha * s + f.beta, f.k, f.kc);
    return f.A * (f.family == Family::Cn ? t.cn : t.dn);
}

ElasticaFit classify_elastica(const DiscreteCurve& curve, double eps, double threshold) {
    if (!(eps > 0.0))
        throw std::invalid_argument("classify_elastica: eps must be positive");
    const auto kappa = curvature(curve);
    const double h = curve.step();
    const double kmax = max_abs(kappa);
    ElasticaFit line;
    line.eps = eps;
    line.family = Family::Line;
    line.residual = kmax;
    line.ok = true;
    if (kmax * eps <= 1e-8)
        return line;
    const auto dk = differentiate(kappa, h);
    // discriminant at the anchor decides ties; a clear residual difference wins otherwise
    std::size_t anchor = 0;
    for (std::size_t i = 0; i < kappa.size(); ++i)
        if (std::abs(kappa[i]) > std::abs(kappa[anchor]))
            anchor = i;
    const double a0 = kappa[anchor], b0 = dk[anchor];
    const double disc = (a0 * a0 - 2.0 / (eps * eps)) * a0 * a0 + 4.0 * b0 * b0;
    const ElasticaFit cn = fit_family(Family::Cn, kappa, dk, h, eps);
    const ElasticaFit dn = fit_family(Family::Dn, kappa, dk, h, eps);
    ElasticaFit best;
    if (std::abs(cn.residual - dn.residual) <= 1e-3 * std::max(cn.residual, dn.residual))
        best = disc >= 0.0 ? cn : dn;
    else
        best = cn.residual < dn.residual ? cn : dn;
    best.ok = best.residual <= threshold * kmax;
    return best;
}

int count_inflections(const DiscreteCurve& curve, double tol) {
    constexpr std::size_t flank = 8;
    const auto kappa = curvature(curve);
    if (!(tol > 0.0))
        tol = 1e-4 * max_abs(kappa);
    if (!(tol > 0.0))
        return 0;
    // runs of significant same-sign curvature; short runs are treated as noise
    std::vector<int> signs;
    std::size_t i = 0;
    const std::size_t n = kappa.size();
    while (i < n) {
        if (std::abs(kappa[i]) < tol) {
            ++i;
            continue;
        }
        const int s = kappa[i] > 0.0 ? 1 : -1;
        std::size_t j = i;
        while (j < n && std::abs(kappa[j]) >= tol && (kappa[j] > 0.0 ? 1 : -1) == s)
            ++j;
        if (j - i >= flank && (signs.empty() || signs.back() != s))
            signs.push_back(s);
        i = j;
    }
    return signs.empty() ? 0 : static_cast<int>(signs.size()) - 1;
}

bool has_self_intersection(const DiscreteCurve& curve) {
    const auto p = reconstruct_positions(curve);
    const std::size_t ns = p.size() - 1;
    struct Box {
        double x0, x1, y0, y1;
    };
    std::vector<Box> box(ns);
    for (std::size_t i = 0; i < ns; ++i)
        box[i] = {std::min(p[i][0], p[i + 1][0]), std::max(p[i][0], p[i + 1][0]), std::min(p[i][1], p[i + 1][1]),
                  std::max(p[i][1], p[i + 1][1])};
    auto orient = [](const Point& a, const Point& b, const Point& c) {
        const double ux = b[0] - a[0], uy = b[1] - a[1], vx = c[0] - a[0], vy = c[1] - a[1];
        const double o = ux * vy - uy * vx;
        const double scale = std::hypot(ux, uy) * std::hypot(vx, vy);
        if (std::abs(o) <= 1e-14 * scale)
            return 0;
        return o > 0.0 ? 1 : -1;
    };
    auto on_segment = [](const Point& a, const Point& b, const Point& c) {
        return std::min(a[0], b[0]) <= c[0] && c[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= c[1] &&
               c[1] <= std::max(a[1], b[1]);
    };
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = i + 2; j < ns; ++j) {
            if (box[j].x0 > box[i].x1 || box[j].x1 < box[i].x0 || box[j].y0 > box[i].y1 || box[j].y1 < box[i].y0)
                continue;
            const Point &a = p[i], &b = p[i + 1], &c = p[j], &d = p[j + 1];
            const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
            if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) {
                if (o1 != 0 || o2 != 0)
                    return true;
            }
            if (o1 == 0 && on_segment(a, b, c))
                return true;
            if (o2 == 0 && on_segment(a, b, d))
                return true;
            if (o3 == 0 && on_segment(c, d, a))
                return true;
            if (o4 == 0 && on_segment(c, d, b))
                return true;
        }
    }
    return false;
}

double straightness_profile(const DiscreteCurve& curve, double eps, double c) {
    const double L = curve.length;
    if (!(2.0 * c * eps < L))
        throw std::invalid_argument("straightness_profile: window [c eps, L - c eps] is empty");
    const double h = curve.step();
    double m = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < curve.theta.size(); ++i) {
        const double s = h * static_cast<double>(i);
        if (s < c * eps || s > L - c * eps)
            continue;
        any = true;
        // |(cos t, sin t) - (1, 0)| = 2 |sin(t/2)|
        m = std::max(m, 2.0 * std::abs(std::sin(0.5 * curve.theta[i])));
    }
    if (!any)
        throw std::invalid_argument("straightness_profile: no nodes in window");
    return m;
}

double total_angle_variation(const DiscreteCurve& curve) {
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < curve.theta.size(); ++i)
        v += std::abs(curve.theta[i + 1] - curve.theta[i]);
    return v;
}

RescaledDeviation rescaled_deviation(const DiscreteCurve& curve, double eps, double theta0, double c) {
    const DiscreteCurve r = rescale(curve, eps, c);
    const BorderlineSpec spec = make_borderline(theta0);
    const auto kappa = curvature(r);
    const double h = r.step();
    RescaledDeviation d;
    for (std::size_t i = 0; i < r.theta.size(); ++i) {
        const double s = h * static_cast<double>(i);
        d.c0 = std::max(d.c0, std::abs(r.theta[i] - borderline_angle(spec, s)));
        d.c1 = std::max(d.c1, std::abs(kappa[i] - borderline_curvature(spec, s)));
    }
    return d;
}

GraphSamples synth_inflection_graph(double k, std::size_t n) {
    if (!(k > 0.0 && k < 1.0 / kSqrt2))
        throw std::invalid_argument("synth_inflection_graph: need 0 < k < 1/sqrt2 for a graph");
    if (n < 16)
        throw std::invalid_argument("synth_inflection_graph: grid too small");
    const double K = ellint_K(k);
    auto xprime = [&](double s) {
        const double sn = jacobi(s, k).sn;
        return 1.0 - 2.0 * k * k * sn * sn;
    };
    // x(s) from a fine table plus 8-point Gauss-Legendre on the remainder
    static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                 -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    auto gauss = [&](double a, double b) {
        const double m = 0.5 * (a + b), hw = 0.5 * (b - a);
        double s = 0.0;
        for (int i = 0; i < 8; ++i)
            s += gw[i] * xprime(m + hw * gx[i]);
        return hw * s;
    };
    const double smax = 1.5 * K;
    const std::size_t T = 2048;
    const double ds = smax / static_cast<double>(T);
    std::vector<double> tab(T + 1, 0.0);
    for (std::size_t i = 0; i < T; ++i)
        tab[i + 1] = tab[i] + gauss(ds * static_cast<double>(i), ds * static_cast<double>(i + 1));
    auto xs = [&](double s) {
        const double sa = std::abs(s);
        const auto j = std::min<std::size_t>(static_cast<std::size_t>(sa / ds), T - 1);
        const double v = tab[j] + gauss(ds * static_cast<double>(j), sa);
        return std::copysign(v, s);
    };
    GraphSamples g;
    g.R = xs(K);
    g.r = xs(smax) - g.R;
    const double X = g.R + g.r;
    g.x.resize(n + 1);
    g.u.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = -X + 2.0 * X * static_cast<double>(i) / static_cast<double>(n);
        g.x[i] = x;
        double s = x;  // x'(s) is in [1 - 2k^2, 1]
        for (int it = 0; it < 50; ++it) {
            const double step = (xs(s) - x) / xprime(s);
            s -= step;
            if (std::abs(step) < 1e-15)
                break;
        }
        g.u[i] = 2.0 * k * jacobi(s, k).cn;
    }
    g.x.front() = -X;
    g.x.back() = X;
    return g;
}

double graph_energy(const std::vector<double>& x, const std::vector<double>& u, double eps) {
    const std::size_t n = u.size();
    if (n < 4)
        throw std::invalid_argument("graph_energy: need at least 4 samples");
    const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
    const auto up = differentiate(u, h);
    std::vector<double> upp(n);
    for (std::size_t i = 1; i + 1 < n; ++i)
        upp[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
    upp[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
    upp[n - 1] = (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) / (h * h);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = 1.0 + up[i] * up[i];
        const double v = eps * eps * upp[i] * upp[i] / std::pow(q, 2.5) + std::sqrt(q);
        e += ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * v;
    }
    return h * e;
}

namespace {

// Four-point Lagrange interpolation of samples and of its derivative.
void interp4(const GraphSamples& g, double x, double& val, double& der) {
    const std::size_t n = g.x.size();
    const double h = g.x[1] - g.x[0];
    auto i = static_cast<std::ptrdiff_t>(std::floor((x - g.x[0]) / h)) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 4);
    val = 0.0;
    der = 0.0;
    for (int a = 0; a < 4; ++a) {
        const double xa = g.x[static_cast<std::size_t>(i + a)];
        double w = 1.0, dw = 0.0;
        for (int b = 0; b < 4; ++b) {
            if (b == a)
                continue;
            const double xb = g.x[static_cast<std::size_t>(i + b)];
            double prod = 1.0 / (xa - xb);
            for (int c = 0; c < 4; ++c) {
                if (c == a || c == b)
                    continue;
                const double xc = g.x[static_cast<std::size_t>(i + c)];
                prod *= (x - xc) / (xa - xc);
            }
            dw += prod;
            w *= (x - xb) / (xa - xb);
        }
        val += w * g.u[static_cast<std::size_t>(i + a)];
        der += dw * g.u[static_cast<std::size_t>(i + a)];
    }
}

void check_sshape_hypotheses(const GraphSamples& g) {
    const std::size_t n = g.u.size();
    if (n < 16 || g.x.size() != n || !(g.r > 0.0) || !(g.R > 0.0))
        throw std::invalid_argument("sshape_perturb: malformed graph samples");
    const double X = g.R + g.r;
    if (std::abs(g.x.front() + X) > 1e-9 * X || std::abs(g.x.back() - X) > 1e-9 * X)
        throw std::invalid_argument("sshape_perturb: grid must span [-R-r, R+r]");
    double scale = 0.0;
    for (double v : g.u)
        scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(g.u[i] - g.u[n - 1 - i]) > 1e-9 * scale)
            throw std::invalid_argument("sshape_perturb: u is not even");
    const double h = g.x[1] - g.x[0];
    const auto up = differentiate(g.u, h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double x = g.x[i];
        if (x >= g.R && x <= X - h) {
            double v, d;
            interp4(g, 2.0 * g.R - x, v, d);
            if (std::abs(v + g.u[i]) > 1e-6 * scale)
                throw std::invalid_argument("sshape_perturb: u is not odd about R");
        }
        if (x >= g.R - g.r && x <= X && !(up[i] < 0.0))
            throw std::invalid_argument("sshape_perturb: u' must be negative on [R-r, R+r]");
        if (x > g.R + 2.0 * h && x < X) {
            const double upp = (g.u[i + 1] - 2.0 * g.u[i] + g.u[i - 1]) / (h * h);
            if (!(upp > 0.0))
                throw std::invalid_argument("sshape_perturb: u'' must be positive on (R, R+r]");
        }
    }
}

} // namespace

SShapeResult sshape_perturb(const GraphSamples& g, double delta, double eps) {
    check_sshape_hypotheses(g);
    if (!(delta > 0.0 && delta < g.r))
        throw std::invalid_argument("sshape_perturb: need 0 < delta < r");
    double ub, dub;  // U(R + delta), U'(R + delta)
    interp4(g, g.R + delta, ub, dub);
    SShapeResult out;
    // continuity of value and slope at R - delta, using oddness about R
    out.shift = -2.0 * ub + 2.0 * delta * dub;
    out.u_delta = g.u;
    for (std::size_t i = 0; i < g.u.size(); ++i) {
        const double ax = std::abs(g.x[i]);
        if (ax >= g.R + delta)
            continue;
        if (ax <= g.R - delta)
            out.u_delta[i] = g.u[i] - out.shift;
        else
            out.u_delta[i] = ub + dub * (ax - (g.R + delta));
    }
    out.energy_before = graph_energy(g.x, g.u, eps);
    out.energy_after = graph_energy(g.x, out.u_delta, eps);
    return out;
}

nlohmann::json to_json(const ElasticaFit& f) {
    return {{"family", family_name(f.family)}, {"A", f.A},     {"alpha", f.alpha},       {"beta", f.beta},
            {"k", f.k},                         {"kc", f.kc},   {"eps", f.eps},           {"residual", f.residual},
            {"ok", f.ok}};
}

nlohmann::json diagnostics_report(const DiscreteCurve& curve, const BoundaryCondition& bc, double eps,
                                  const std::vector<double>& c_values) {
    nlohmann::json j;
    j["bc"] = to_json(bc);
    j["eps"] = eps;
    j["energy"] = to_json(energies(curve, eps));
    j["inflections"] = count_inflections(curve);
    j["self_intersection"] = has_self_intersection(curve);
    j["total_angle_variation"] = total_angle_variation(curve);
    try {
        j["winding"] = winding_number(curve, bc);
    } catch (const std::invalid_argument&) {
        j["winding"] = nullptr;
    }
    j["fit"] = to_json(classify_elastica(curve, eps));
    nlohmann::json per_c = nlohmann::json::array();
    for (double c : c_values) {
        nlohmann::json row{{"c", c}};
        try {
            row["straightness"] = straightness_profile(curve, eps, c);
        } catch (const std::invalid_argument&) {
            row["straightness"] = nullptr;
        }
        if (bc.theta0 != 0.0 && c * eps <= curve.length) {
            const auto d = rescaled_deviation(curve, eps, bc.theta0, c);
            row["rescaled_dev_c0"] = d.c0;
            row["rescaled_dev_c1"] = d.c1;
        }
        per_c.push_back(row);
    }
    j["windows"] = per_c;
    return j;
}

} // namespace elastica
