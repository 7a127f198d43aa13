// elastica_lab: solve / sweep / straighten / diagnose / test-curve driver.
#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "elastica/diagnostics.hpp"
#include "elastica/extensible.hpp"
#include "elastica/geometry.hpp"
#include "elastica/inextensible.hpp"

namespace fs = std::filesystem;
using namespace elastica;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

unsigned worker_count() {
    if (const char* s = std::getenv("ELASTICA_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        if (end != s && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
        throw ConfigError("ELASTICA_LAB_THREADS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(n);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool)
        th.join();
    for (auto& e : errs)
        if (e)
            std::rethrow_exception(e);
}

std::string num(double x) {
    if (!std::isfinite(x))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// shortest form that still round-trips, so 0.1 stays "0.1" in file names
std::string eps_tag(double eps) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, eps);
    return std::string(buf, r.ptr);
}

void warn_classes(const MinimizerCertificate& c) {
    if (c.unexcluded_classes.empty())
        return;
    std::string list;
    for (int m : c.unexcluded_classes)
        list += (list.empty() ? "" : " ") + std::to_string(m);
    std::cerr << "warning: eps=" << c.eps << ": winding classes " << list
              << " were not searched and are not excluded by the energy bound; widen the class set\n";
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    out << s;
}

// --- SVG ----------------------------------------------------------------------------------

struct Series {
    std::vector<Point> pts;
    std::string color;
    bool markers = false;
};

std::string svg_plot(const std::vector<Series>& series, bool equal_aspect, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel) {
    const double W = 640, H = 480, pad = 60;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (const auto& p : s.pts) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
                continue;
            x0 = std::min(x0, p[0]);
            x1 = std::max(x1, p[0]);
            y0 = std::min(y0, p[1]);
            y1 = std::max(y1, p[1]);
        }
    if (!(x1 >= x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 - x0 < 1e-12) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 - y0 < 1e-12) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    double sx = (W - 2 * pad) / (x1 - x0), sy = (H - 2 * pad) / (y1 - y0);
    if (equal_aspect)
        sx = sy = std::min(sx, sy);
    auto X = [&](double x) { return pad + (x - x0) * sx; };
    auto Y = [&](double y) { return H - pad - (y - y0) * sy; };

    std::ostringstream o;
    o.precision(6);
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
      << "</text>\n";
    o << "<text x=\"16\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << H / 2 << ")\">"
      << ylabel << "</text>\n";
    o << "<text x=\"" << pad << "\" y=\"" << H - pad + 16 << "\" font-size=\"10\">" << x0 << "</text>\n";
    o << "<text x=\"" << W - pad << "\" y=\"" << H - pad + 16 << "\" font-size=\"10\" text-anchor=\"end\">" << x1
      << "</text>\n";
    o << "<text x=\"" << pad - 4 << "\" y=\"" << H - pad << "\" font-size=\"10\" text-anchor=\"end\">" << y0
      << "</text>\n";
    o << "<text x=\"" << pad - 4 << "\" y=\"" << pad + 10 << "\" font-size=\"10\" text-anchor=\"end\">" << y1
      << "</text>\n";
    for (const auto& s : series) {
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : s.pts)
            if (std::isfinite(p[0]) && std::isfinite(p[1]))
                o << X(p[0]) << ',' << Y(p[1]) << ' ';
        o << "\"/>\n";
        if (s.markers)
            for (const auto& p : s.pts)
                if (std::isfinite(p[0]) && std::isfinite(p[1]))
                    o << "<circle cx=\"" << X(p[0]) << "\" cy=\"" << Y(p[1]) << "\" r=\"3\" fill=\"" << s.color
                      << "\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string svg_curve(const DiscreteCurve& c, const std::string& title) {
    auto pts = reconstruct_positions(c);
    // thin out long polylines; the shape is unaffected at plot resolution
    std::vector<Point> thin;
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 2048);
    for (std::size_t i = 0; i < pts.size(); i += stride)
        thin.push_back(pts[i]);
    if ((pts.size() - 1) % stride != 0)
        thin.push_back(pts.back());
    return svg_plot({{thin, "steelblue", false}}, true, title, "x", "y");
}

// --- configuration ------------------------------------------------------------------------

struct Common {
    double l = 1.0;
    double theta0 = 0.0;
    double theta1 = 0.0;
    std::vector<double> eps;
    std::size_t grid = 4096;
    std::vector<double> c;
    std::string out = "out";
    unsigned seed = 0;
};

SolveOptions solve_options(const Common& cfg) {
    SolveOptions o;
    o.N = cfg.grid;
    o.seed = cfg.seed;
    o.validate();
    return o;
}

void check_bc(const BoundaryCondition& bc) {
    try {
        bc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void check_eps(const std::vector<double>& eps) {
    if (eps.empty())
        throw ConfigError("at least one --eps is required");
    for (double e : eps)
        if (!(e > 0.0) || !std::isfinite(e))
            throw ConfigError("--eps values must be positive");
}

void check_grid(const Common& cfg) {
    if (cfg.grid < 64)
        throw ConfigError("--grid must be at least 64");
    for (double c : cfg.c)
        if (!(c > 0.0))
            throw ConfigError("--c values must be positive");
}

fs::path out_dir(const Common& cfg) {
    fs::path p(cfg.out);
    fs::create_directories(p);
    return p;
}

// --- commands -----------------------------------------------------------------------------

int cmd_solve(const Common& cfg) {
    const BoundaryCondition bc{cfg.l, cfg.theta0, cfg.theta1};
    check_bc(bc);
    check_eps(cfg.eps);
    if (cfg.eps.size() != 1)
        throw ConfigError("solve takes exactly one --eps");
    check_grid(cfg);
    const double eps = cfg.eps.front();
    const auto opts = solve_options(cfg);
    const auto dir = out_dir(cfg);
    const auto r = minimize_extensible(bc, eps, opts);
    warn_classes(r.cert);
    write_json_file((dir / "curve.json").string(), to_json(r.curve));
    auto cert = to_json(r.cert);
    cert["bc"] = to_json(bc);
    write_json_file((dir / "certificate.json").string(), cert);
    const std::vector<double> cs = cfg.c.empty() ? std::vector<double>{5.0, 10.0} : cfg.c;
    write_json_file((dir / "diagnostics.json").string(), diagnostics_report(r.curve, bc, eps, cs));
    write_text(dir / "curve.svg", svg_curve(r.curve, "minimizer eps=" + eps_tag(eps)));
    std::cout << "E=" << num(r.cert.energy.e_eps) << " L=" << num(r.curve.length) << " B="
              << num(r.cert.energy.bending) << " stationarity=" << num(r.cert.stationarity)
              << " converged=" << (r.cert.converged ? "yes" : "no") << "\n";
    return r.cert.converged ? 0 : kExitNotConverged;
}

int cmd_sweep_eps(const Common& cfg) {
    const BoundaryCondition bc{cfg.l, cfg.theta0, cfg.theta1};
    check_bc(bc);
    check_eps(cfg.eps);
    check_grid(cfg);
    const auto opts = solve_options(cfg);
    const std::vector<double> cs = cfg.c.empty() ? std::vector<double>{10.0} : cfg.c;
    const auto dir = out_dir(cfg);

    struct Row {
        SolveResult sol;
        int inflections = 0;
        bool self_x = false;
        std::vector<double> straight, dev;
    };
    std::vector<Row> rows(cfg.eps.size());
    parallel_for(cfg.eps.size(), worker_count(), [&](std::size_t i) {
        const double eps = cfg.eps[i];
        Row& row = rows[i];
        row.sol = minimize_extensible(bc, eps, opts);
        warn_classes(row.sol.cert);
        const auto& curve = row.sol.curve;
        row.inflections = count_inflections(curve);
        row.self_x = has_self_intersection(curve);
        for (double c : cs) {
            double st = std::numeric_limits<double>::quiet_NaN();
            if (2.0 * c * eps < curve.length)
                st = straightness_profile(curve, eps, c);
            double dv = std::numeric_limits<double>::quiet_NaN();
            if (bc.theta0 != 0.0 && c * eps <= curve.length)
                dv = rescaled_deviation(curve, eps, bc.theta0, c).c0;
            row.straight.push_back(st);
            row.dev.push_back(dv);
        }
    });

    std::string csv = "eps,E,(E-l)/eps,L,(L-l)/eps,inflections,self_x,straightness(c),rescaled_dev(c)";
    for (std::size_t j = 1; j < cs.size(); ++j)
        csv += ",straightness(c=" + eps_tag(cs[j]) + "),rescaled_dev(c=" + eps_tag(cs[j]) + ")";
    csv += "\n";
    bool all_converged = true;
    Series se{{}, "firebrick", true}, sl{{}, "steelblue", true};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double eps = cfg.eps[i];
        const auto& r = rows[i];
        const double E = r.sol.cert.energy.e_eps, L = r.sol.curve.length;
        csv += num(eps) + "," + num(E) + "," + num((E - bc.l) / eps) + "," + num(L) + "," + num((L - bc.l) / eps) +
               "," + std::to_string(r.inflections) + "," + (r.self_x ? "1" : "0");
        for (std::size_t j = 0; j < cs.size(); ++j)
            csv += "," + num(r.straight[j]) + "," + num(r.dev[j]);
        csv += "\n";
        all_converged = all_converged && r.sol.cert.converged;
        se.pts.push_back({eps, (E - bc.l) / eps});
        sl.pts.push_back({eps, (L - bc.l) / eps});
        const std::string tag = "eps_" + eps_tag(eps);
        write_json_file((dir / ("curve_" + tag + ".json")).string(), to_json(r.sol.curve));
        auto cert = to_json(r.sol.cert);
        cert["bc"] = to_json(bc);
        write_json_file((dir / ("certificate_" + tag + ".json")).string(), cert);
    }
    write_text(dir / "sweep.csv", csv);
    std::sort(se.pts.begin(), se.pts.end());
    std::sort(sl.pts.begin(), sl.pts.end());
    const double ce = 2.0 * length_coefficient(bc.theta0, bc.theta1), cl = length_coefficient(bc.theta0, bc.theta1);
    std::vector<Series> plot{se, sl};
    if (!se.pts.empty()) {
        const double a = se.pts.front()[0], b = se.pts.back()[0];
        plot.push_back({{{a, ce}, {b, ce}}, "gray", false});
        plot.push_back({{{a, cl}, {b, cl}}, "gray", false});
    }
    write_text(dir / "sweep.svg", svg_plot(plot, false, "(E-l)/eps (red), (L-l)/eps (blue)", "eps", "ratio"));
    std::cout << csv;
    return all_converged ? 0 : kExitNotConverged;
}

int cmd_straighten(const Common& cfg, double big_l, const std::vector<double>& l_values) {
    if (!(big_l > 0.0))
        throw ConfigError("--big-l must be positive");
    if (l_values.empty())
        throw ConfigError("straighten needs at least one --l");
    check_bc({big_l, cfg.theta0, cfg.theta1});
    check_grid(cfg);
    const auto opts = solve_options(cfg);
    std::vector<SweepRow> rows;
    try {
        rows = straightening_sweep(big_l, cfg.theta0, cfg.theta1, l_values, opts, 1e-10, worker_count());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto dir = out_dir(cfg);
    const std::string csv = sweep_csv(rows);
    write_text(dir / "straighten.csv", csv);
    Series s{{}, "steelblue", true};
    bool ok = true;
    for (const auto& r : rows) {
        s.pts.push_back({r.l, r.ratio});
        ok = ok && r.attained;
        write_json_file((dir / ("curve_l_" + eps_tag(r.l) + ".json")).string(), to_json(r.curve));
    }
    std::vector<Series> plot{s};
    if (!rows.empty()) {
        const double c = length_coefficient(cfg.theta0, cfg.theta1);
        plot.push_back({{{rows.front().l, c}, {rows.back().l, c}}, "gray", false});
    }
    write_text(dir / "straighten.svg", svg_plot(plot, false, "(L-l)/eps_tilde", "l", "ratio"));
    std::cout << csv;
    return ok ? 0 : kExitNotConverged;
}

int cmd_diagnose(const Common& cfg, const std::string& path, bool have_l, bool have_t0, bool have_t1) {
    DiscreteCurve curve;
    try {
        curve = curve_from_json(read_json_file(path));
        curve.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot load curve: ") + e.what());
    }
    check_eps(cfg.eps);
    if (cfg.eps.size() != 1)
        throw ConfigError("diagnose takes exactly one --eps");
    const double eps = cfg.eps.front();
    BoundaryCondition bc{cfg.l, cfg.theta0, cfg.theta1};
    if (!have_l)
        bc.l = std::hypot(endpoint(curve)[0], endpoint(curve)[1]);
    if (!have_t0)
        bc.theta0 = curve.theta.front();
    if (!have_t1)
        bc.theta1 = reduce_angle(curve.theta.back());
    check_bc(bc);
    const std::vector<double> cs = cfg.c.empty() ? std::vector<double>{5.0, 10.0} : cfg.c;
    auto rep = diagnostics_report(curve, bc, eps, cs);
    rep["stationarity"] = stationarity_residual(curve, bc, eps);
    rep["elastica_residual"] = elastica_residual(curve, eps);
    const auto dir = out_dir(cfg);
    write_json_file((dir / "diagnostics.json").string(), rep);
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_test_curve(const Common& cfg, double alpha) {
    const BoundaryCondition bc{cfg.l, cfg.theta0, cfg.theta1};
    check_bc(bc);
    check_eps(cfg.eps);
    check_grid(cfg);
    const auto dir = out_dir(cfg);
    nlohmann::json table = nlohmann::json::array();
    for (double eps : cfg.eps) {
        DiscreteCurve c;
        try {
            c = build_test_curve(bc, eps, alpha, cfg.grid);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        const auto e = energies(c, eps);
        const std::string tag = "eps_" + eps_tag(eps);
        write_json_file((dir / ("test_curve_" + tag + ".json")).string(), to_json(c));
        write_text(dir / ("test_curve_" + tag + ".svg"), svg_curve(c, "test curve eps=" + eps_tag(eps)));
        const Point p = endpoint(c);
        table.push_back({{"eps", eps},
                         {"alpha", alpha},
                         {"energy", to_json(e)},
                         {"endpoint", {p[0], p[1]}},
                         {"limit_f_eps", 2.0 * length_coefficient(bc.theta0, bc.theta1)}});
    }
    write_json_file((dir / "test_curves.json").string(), table);
    std::cout << table.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"elastica_lab: elastic curve experiments"};
    app.require_subcommand(1);

    Common cfg;
    double big_l = 1.0, alpha = 0.5;
    std::vector<double> l_values;
    std::string curve_path;

    auto add_bc = [&](CLI::App* s, bool l_list) {
        if (l_list)
            s->add_option("--l", l_values, "chord lengths l < L (repeatable)");
        else
            s->add_option("--l", cfg.l, "endpoint distance");
        s->add_option("--theta0", cfg.theta0, "tangent angle at the start");
        s->add_option("--theta1", cfg.theta1, "tangent angle at the end");
    };
    auto add_common = [&](CLI::App* s) {
        s->add_option("--grid", cfg.grid, "number of intervals N");
        s->add_option("--out", cfg.out, "output directory");
        s->add_option("--seed", cfg.seed, "random seed");
    };

    auto* solve = app.add_subcommand("solve", "global minimizer of the extensible problem");
    add_bc(solve, false);
    solve->add_option("--eps", cfg.eps, "eps")->required();
    solve->add_option("--c", cfg.c, "window constants for diagnostics (repeatable)");
    add_common(solve);

    auto* sweep = app.add_subcommand("sweep-eps", "minimizers along a list of eps");
    add_bc(sweep, false);
    sweep->add_option("--eps", cfg.eps, "eps values (repeatable)");
    sweep->add_option("--c", cfg.c, "window constants (repeatable), first one fills the main columns");
    add_common(sweep);

    auto* straighten = app.add_subcommand("straighten", "fixed-length straightening sweep");
    add_bc(straighten, true);
    straighten->add_option("--big-l", big_l, "curve length L");
    add_common(straighten);

    auto* diagnose = app.add_subcommand("diagnose", "diagnostics of a stored curve");
    diagnose->add_option("curve", curve_path, "curve JSON")->required();
    auto* opt_l = diagnose->add_option("--l", cfg.l, "endpoint distance (default: from the curve)");
    auto* opt_t0 = diagnose->add_option("--theta0", cfg.theta0, "start angle (default: from the curve)");
    auto* opt_t1 = diagnose->add_option("--theta1", cfg.theta1, "end angle (default: from the curve)");
    diagnose->add_option("--eps", cfg.eps, "eps")->required();
    diagnose->add_option("--c", cfg.c, "window constants (repeatable)");
    diagnose->add_option("--out", cfg.out, "output directory");

    auto* test = app.add_subcommand("test-curve", "layer-connector-layer comparison curve");
    add_bc(test, false);
    test->add_option("--eps", cfg.eps, "eps values (repeatable)");
    test->add_option("--alpha", alpha, "layer window exponent, eps^alpha");
    add_common(test);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*solve)
            return cmd_solve(cfg);
        if (*sweep)
            return cmd_sweep_eps(cfg);
        if (*straighten)
            return cmd_straighten(cfg, big_l, l_values);
        if (*diagnose)
            return cmd_diagnose(cfg, curve_path, opt_l->count() > 0, opt_t0->count() > 0, opt_t1->count() > 0);
        if (*test)
            return cmd_test_curve(cfg, alpha);
    } catch (const ConfigError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitInvalid;
}
