#include "elastica/inextensible.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "elastica/diagnostics.hpp"

namespace elastica {

double length_coefficient(double theta0, double theta1) {
    const double a = std::sin(0.25 * theta0), b = std::sin(0.25 * theta1);
    return 4.0 * std::numbers::sqrt2 * (a * a + b * b);
}

LengthSample length_of_min(const BoundaryCondition& bc, double eps, const SolveOptions& opts) {
    if (!(eps > 0.0))
        throw std::invalid_argument("length_of_min: eps must be positive");
    LengthSample out;
    out.solve = minimize_extensible(bc, eps, opts);
    out.length = out.solve.curve.length;
    for (double t : out.solve.cert.tie_lengths) {
        const bool seen = std::any_of(out.tie_lengths.begin(), out.tie_lengths.end(),
                                      [&](double x) { return std::abs(x - t) <= 1e-9; });
        if (!seen)
            out.tie_lengths.push_back(t);
    }
    if (out.tie_lengths.size() < 2)
        out.tie_lengths.clear();
    return out;
}

void LengthTable::insert(LengthRow row) {
    auto it = std::lower_bound(rows.begin(), rows.end(), row.eps,
                               [](const LengthRow& r, double e) { return r.eps < e; });
    rows.insert(it, std::move(row));
}

std::vector<std::size_t> LengthTable::violations(double tol) const {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i].length > rows[i + 1].length + tol)
            v.push_back(i);
    return v;
}

LengthTable build_length_table(const BoundaryCondition& bc, const std::vector<double>& eps_values,
                               const SolveOptions& opts) {
    LengthTable t;
    for (double e : eps_values) {
        auto s = length_of_min(bc, e, opts);
        t.insert({e, s.length, s.solve.cert.energy.e_eps, std::move(s.solve.curve)});
    }
    return t;
}

namespace {

// Length of the minimizer as a function of eps. Warm starts from the previous solve keep
// the bracketing cheap; the final point is re-checked with the full multistart.
class LengthFunction {
public:
    LengthFunction(const BoundaryCondition& bc, const SolveOptions& opts, bool warm)
        : bc_(bc), opts_(opts), warm_(warm) {}

    const SolveResult& operator()(double eps) {
        if (warm_ && have_)
            last_ = minimize_from(bc_, eps, last_.curve, opts_);
        else
            last_ = minimize_extensible(bc_, eps, opts_);
        if (warm_ && !last_.cert.converged)
            last_ = minimize_extensible(bc_, eps, opts_);
        have_ = true;
        ++count_;
        return last_;
    }

    int count() const { return count_; }

private:
    BoundaryCondition bc_;
    SolveOptions opts_;
    bool warm_;
    bool have_ = false;
    SolveResult last_;
    int count_ = 0;
};

struct Point2 {
    double eps;
    double g;  // length - target
    SolveResult sol;
};

InextensibleResult bracket_and_solve(double target, const BoundaryCondition& bc, double tol, const SolveOptions& opts,
                                     bool warm) {
    LengthFunction f(bc, opts, warm);
    const double lo_bound = 1e-4 * bc.l, hi_bound = 0.5 * bc.l;
    const double c = length_coefficient(bc.theta0, bc.theta1);
    // first guess from the small-eps slope of the length
    double e0 = std::clamp((target - bc.l) / (c * bc.l), lo_bound, hi_bound);

    auto sample = [&](double e) {
        const SolveResult& s = f(e);
        return Point2{e, s.curve.length - target, s};
    };

    Point2 a = sample(e0);
    Point2 b = a;
    const double grow = 1.25;
    for (int i = 0; i < 80; ++i) {
        if (a.g == 0.0)
            break;
        // step away from the target side, leaving [lo_bound, hi_bound] only geometrically
        double e = a.g < 0.0 ? b.eps * grow : b.eps / grow;
        if (a.g < 0.0 && b.eps >= hi_bound)
            e = b.eps * 2.0;
        if (a.g > 0.0 && b.eps <= lo_bound)
            e = b.eps / 2.0;
        b = sample(e);
        if ((a.g < 0.0) != (b.g < 0.0) || b.g == 0.0)
            break;
        a = b;
    }
    if ((a.g < 0.0) == (b.g < 0.0) && a.g != 0.0 && b.g != 0.0)
        throw std::runtime_error("solve_inextensible: could not bracket the target length");

    Point2 lo = a.g < 0.0 ? a : b;
    Point2 hi = a.g < 0.0 ? b : a;
    Point2 best = std::abs(lo.g) < std::abs(hi.g) ? lo : hi;
    int side = 0;
    while (std::abs(best.g) > tol) {
        if (hi.eps - lo.eps <= 1e-13 * hi.eps)
            break;
        // Illinois variant of regula falsi
        double glo = lo.g, ghi = hi.g;
        if (side == -1)
            ghi *= 0.5;
        if (side == 1)
            glo *= 0.5;
        double e = lo.eps - glo * (hi.eps - lo.eps) / (ghi - glo);
        if (!(e > lo.eps && e < hi.eps))
            e = 0.5 * (lo.eps + hi.eps);
        Point2 p = sample(e);
        if (std::abs(p.g) < std::abs(best.g))
            best = p;
        if (p.g < 0.0) {
            lo = std::move(p);
            side = -1;
        } else {
            hi = std::move(p);
            side = 1;
        }
        if (f.count() > 200)
            break;
    }

    InextensibleResult r;
    r.eps_tilde = best.eps;
    r.curve = best.sol.curve;
    r.cert = best.sol.cert;
    r.attained = std::abs(best.g) <= tol;
    r.eps_lo = lo.eps;
    r.eps_hi = hi.eps;
    r.length_lo = lo.g + target;
    r.length_hi = hi.g + target;
    r.evaluations = f.count();
    return r;
}

} // namespace

InextensibleResult solve_inextensible(double L, const BoundaryCondition& bc, double tol, const SolveOptions& opts) {
    bc.validate();
    opts.validate();
    if (bc.theta0 == 0.0 && bc.theta1 == 0.0)
        throw std::invalid_argument(
            "solve_inextensible: theta0 = theta1 = 0 is the buckling case, not an extensible minimizer");
    if (!(L > bc.l))
        throw std::invalid_argument("solve_inextensible: need L > l");
    if (!(tol > 0.0))
        throw std::invalid_argument("solve_inextensible: tol must be positive");

    InextensibleResult r = bracket_and_solve(L, bc, tol, opts, true);
    // confirm the warm-started branch is the global one
    const SolveResult full = minimize_extensible(bc, r.eps_tilde, opts);
    if (full.cert.energy.e_eps < r.cert.energy.e_eps - 1e-10) {
        r = bracket_and_solve(L, bc, tol, opts, false);
    } else {
        auto starts = full.cert.starts;
        r.cert.starts = std::move(starts);
        r.cert.ties = full.cert.ties;
        r.cert.tie_lengths = full.cert.tie_lengths;
        r.cert.is_global = true;
    }
    return r;
}

DiscreteCurve dilate(const DiscreteCurve& curve, double factor) {
    if (!(factor > 0.0))
        throw std::invalid_argument("dilate: factor must be positive");
    DiscreteCurve out = curve;
    out.length = curve.length * factor;
    return out;
}

std::vector<SweepRow> straightening_sweep(double L, double theta0, double theta1, const std::vector<double>& l_values,
                                          const SolveOptions& opts, double tol, unsigned threads) {
    const BoundaryCondition bcL{L, theta0, theta1};
    bcL.validate();
    if (theta0 == 0.0 && theta1 == 0.0)
        throw std::invalid_argument(
            "straightening_sweep: theta0 = theta1 = 0 is the buckling case, not an extensible minimizer");
    for (std::size_t i = 0; i < l_values.size(); ++i) {
        if (!(l_values[i] > 0.0 && l_values[i] < L))
            throw std::invalid_argument("straightening_sweep: every l must lie in (0, L)");
        if (i > 0 && !(l_values[i] > l_values[i - 1]))
            throw std::invalid_argument("straightening_sweep: l values must be ascending");
    }

    std::vector<SweepRow> rows(l_values.size());
    std::vector<std::exception_ptr> errors(l_values.size());
    auto work = [&](std::size_t i) {
        try {
            const double l = l_values[i];
            // distance L with length L^2 / l, then scale down by l / L
            const auto r = solve_inextensible(L * L / l, bcL, tol, opts);
            SweepRow& row = rows[i];
            row.l = l;
            row.curve = dilate(r.curve, l / L);
            row.eps_tilde = r.eps_tilde * l / L;
            row.ratio = (L - l) / row.eps_tilde;
            row.energy = energies(row.curve, 1.0).bending;
            row.inflections = count_inflections(row.curve);
            row.self_intersections = has_self_intersection(row.curve);
            row.attained = r.attained;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, l_values.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < l_values.size(); ++i)
            work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < l_values.size(); i = next++)
                    work(i);
            });
        for (auto& th : pool)
            th.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "l,eps_tilde,L_minus_l_over_eps,energy,inflections,self_intersections\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%d\n", r.l, r.eps_tilde, r.ratio, r.energy,
                      r.inflections, r.self_intersections ? 1 : 0);
        out += buf;
    }
    return out;
}

} // namespace elastica
