#include "gscr/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace gscr {

namespace {

double gscr_at(SusceptanceMatrix const& b, ConverterSet const& conv) {
    return gscr(eigen_jeq(build_jeq(b, conv.rated_power)));
}

double margin_at(SusceptanceMatrix const& b, ConverterSet const& conv) {
    auto const spectral = eigen_jeq(build_jeq(b, conv.rated_power));
    return gscr(spectral) - cgscr_star(weighted_t(spectral, conv));
}

// det(J_sys) scaled so that it is positive when every eigenvalue of J_sys is
// negative, i.e. on the stable side.
double stable_side_det(SusceptanceMatrix const& b, ConverterSet const& conv) {
    double const det = jsys_determinant(b, conv);
    return b.size() % 2 == 0 ? det : -det;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Root of f in the solved bus power: bracket [0.01, 10], doubling the upper
// end until f turns non-positive.
double solve_power(std::function<double(double)> const& f, BisectionOptions const& opts) {
    double lo = 0.01;
    double hi = 10.0;
    if (!(f(lo) > 0.0)) {
        throw Error(ErrorCode::NoBracket, "no root: function is not positive at " + fmt_double(lo));
    }
    int expansions = 0;
    while (f(hi) > 0.0) {
        if (++expansions > opts.max_expansions) {
            throw Error(ErrorCode::NoBracket, "no sign change up to " + fmt_double(hi));
        }
        lo = hi;
        hi *= 2.0;
    }
    return bisect_first_crossing(f, lo, hi, opts.tol, opts.max_iterations);
}

std::function<double(double)> contour_function(SusceptanceMatrix const& b,
                                               ConverterSet const& conv, std::size_t vary,
                                               ContourTarget const& target) {
    return [&b, conv, vary, target](double p) {
        ConverterSet at = conv;
        at.rated_power[vary] = p;
        switch (target.kind) {
            case ContourTarget::Kind::Gscr: return gscr_at(b, at) - target.value;
            case ContourTarget::Kind::Critical: return margin_at(b, at);
            case ContourTarget::Kind::Singular: return stable_side_det(b, at);
        }
        return 0.0;
    };
}

void check_direction(AcNetwork const& net, LoadingDirection const& dir) {
    if (!(dir.lo < dir.hi) || !std::isfinite(dir.lo) || !std::isfinite(dir.hi)) {
        throw Error(ErrorCode::InvalidArgument, "loading range must satisfy lo < hi");
    }
    check_converters(dir.base, net.size());
    if (dir.bus) net.require_index(*dir.bus);
}

}  // namespace

ConverterSet LoadingDirection::at(AcNetwork const& net, double p) const {
    ConverterSet conv = base;
    if (bus) {
        conv.rated_power[net.require_index(*bus)] = p;
    } else {
        for (auto& pi : conv.rated_power) pi *= p;
    }
    return conv;
}

std::string ContourTarget::label() const {
    switch (kind) {
        case Kind::Gscr: return fmt_double(value);
        case Kind::Critical: return "critical";
        case Kind::Singular: return "singular";
    }
    return "";
}

ContourTarget ContourTarget::parse(std::string const& text) {
    if (text == "critical" || text == "cgscr" || text == "cgscr_star") return critical();
    if (text == "singular") return singular();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (std::exception const&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || !std::isfinite(v) || v <= 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "contour target '" + text + "' is neither a positive number, 'critical' nor 'singular'");
    }
    return gscr(v);
}

double bisect_first_crossing(std::function<double(double)> const& f, double lo, double hi,
                             double tol, int max_iterations, int scan) {
    double f_lo = f(lo);
    if (!(f_lo > 0.0)) {
        throw Error(ErrorCode::NoBracket, "start of bracket " + fmt_double(lo) +
                                              " is not on the positive (stable) side");
    }
    scan = std::max(scan, 1);
    double a = lo;
    double b = hi;
    bool found = false;
    for (int k = 1; k <= scan; ++k) {
        double const x = k == scan ? hi : lo + (hi - lo) * k / scan;
        double const fx = f(x);
        if (fx == 0.0) return x;
        if (fx < 0.0) {
            b = x;
            found = true;
            break;
        }
        a = x;
    }
    if (!found) {
        throw Error(ErrorCode::NoBracket,
                    "no sign change in [" + fmt_double(lo) + ", " + fmt_double(hi) + "]");
    }
    for (int it = 0; it < max_iterations && b - a > tol; ++it) {
        double const mid = 0.5 * (a + b);
        double const fm = f(mid);
        if (fm == 0.0) return mid;
        (fm > 0.0 ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out;
    if (count <= 0) return out;
    if (count == 1) return {lo};
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        out.push_back(k == count - 1 ? hi : lo + (hi - lo) * k / (count - 1));
    }
    return out;
}

SweepResult sweep(AcNetwork const& net, LoadingDirection const& dir, int steps,
                  AnalysisOptions const& opts) {
    check_direction(net, dir);
    if (steps < 2) throw Error(ErrorCode::InvalidArgument, "sweep needs at least 2 steps");
    auto const b = build_susceptance(net);

    SweepResult out;
    for (double p : linspace(dir.lo, dir.hi, steps)) {
        SweepSample sample{p, std::nullopt, {}};
        try {
            sample.report = analyze(b, dir.at(net, p), opts);
        } catch (Error const& e) {
            sample.error = std::string(to_string(e.code())) + ": " + e.what();
            ++out.failed;
        }
        out.samples.push_back(std::move(sample));
    }

    double prev = std::numeric_limits<double>::infinity();
    double lo_c = std::numeric_limits<double>::infinity();
    double hi_c = -lo_c;
    for (auto const& s : out.samples) {
        if (!s.report) continue;
        if (!(s.report->gscr < prev)) out.gscr_strictly_decreasing = false;
        prev = s.report->gscr;
        lo_c = std::min(lo_c, s.report->cgscr_star);
        hi_c = std::max(hi_c, s.report->cgscr_star);
    }
    if (out.failed < out.samples.size()) out.cgscr_star_variation = (hi_c - lo_c) / lo_c;

    auto const& first = out.samples.front();
    if (first.report && first.report->verdict != Verdict::Stable) {
        out.warnings.push_back("sweep starts outside the stable region");
    }
    if (!out.gscr_strictly_decreasing) {
        out.warnings.push_back("gSCR is not strictly decreasing along the sweep");
    }
    return out;
}

std::optional<double> sweep_crossing(SweepResult const& s,
                                     std::function<double(StrengthReport const&)> const& value) {
    SweepSample const* prev = nullptr;
    for (auto const& cur : s.samples) {
        if (!cur.report) continue;
        if (prev != nullptr) {
            double const a = value(*prev->report);
            double const b = value(*cur.report);
            if (a == 0.0) return prev->p;
            if ((a > 0.0) != (b > 0.0) || b == 0.0) {
                return prev->p + (cur.p - prev->p) * a / (a - b);
            }
        }
        prev = &cur;
    }
    return std::nullopt;
}

double find_exact_boundary(AcNetwork const& net, LoadingDirection const& dir,
                           BisectionOptions const& opts) {
    check_direction(net, dir);
    auto const b = build_susceptance(net);
    return bisect_first_crossing(
        [&](double p) { return stable_side_det(b, dir.at(net, p)); }, dir.lo, dir.hi, opts.tol,
        opts.max_iterations);
}

double find_approx_boundary(AcNetwork const& net, LoadingDirection const& dir,
                            BisectionOptions const& opts) {
    check_direction(net, dir);
    auto const b = build_susceptance(net);
    return bisect_first_crossing([&](double p) { return margin_at(b, dir.at(net, p)); }, dir.lo,
                                 dir.hi, opts.tol, opts.max_iterations);
}

BoundaryComparison compare_boundaries(AcNetwork const& net, LoadingDirection const& dir,
                                      BisectionOptions const& opts) {
    BoundaryComparison c;
    c.p_exact = find_exact_boundary(net, dir, opts);
    c.p_approx = find_approx_boundary(net, dir, opts);
    c.rel_error = std::abs(c.p_approx - c.p_exact) / c.p_exact;
    return c;
}

ContourResult gscr_contour(AcNetwork const& net, ConverterSet const& conv,
                           ContourTarget const& target, std::span<double const> grid,
                           ContourAxes const& axes, BisectionOptions const& opts) {
    check_converters(conv, net.size());
    auto const solve = net.require_index(axes.solve_bus);
    auto const stepped = net.require_index(axes.grid_bus);
    if (solve == stepped) {
        throw Error(ErrorCode::InvalidArgument, "contour axes must name two different buses");
    }
    auto const b = build_susceptance(net);

    ContourResult out;
    for (double g : grid) {
        ConverterSet at = conv;
        at.rated_power[stepped] = g;
        try {
            double const p = solve_power(contour_function(b, at, solve, target), opts);
            out.points.push_back({g, p, target});
        } catch (Error const& e) {
            out.skipped.push_back(target.label() + " @ " + fmt_double(g) + ": " +
                                  std::string(to_string(e.code())) + ": " + e.what());
        }
    }
    return out;
}

std::vector<BoundaryGapPoint> boundary_gaps(AcNetwork const& net, ConverterSet const& conv,
                                            std::span<double const> grid,
                                            ContourAxes const& axes,
                                            BisectionOptions const& opts) {
    auto const singular = gscr_contour(net, conv, ContourTarget::singular(), grid, axes, opts);
    if (!singular.skipped.empty()) {
        throw Error(ErrorCode::NoBracket, singular.skipped.front());
    }
    auto const b = build_susceptance(net);
    auto const solve = net.require_index(axes.solve_bus);
    auto const stepped = net.require_index(axes.grid_bus);

    std::vector<BoundaryGapPoint> out;
    for (auto const& pt : singular.points) {
        ConverterSet at = conv;
        at.rated_power[solve] = pt.p_solve;
        at.rated_power[stepped] = pt.p_grid;
        auto const spectral = eigen_jeq(build_jeq(b, at.rated_power));

        BoundaryGapPoint gp;
        gp.p_grid = pt.p_grid;
        gp.p_solve = pt.p_solve;
        gp.gscr = gscr(spectral);
        gp.cgscr_star = cgscr_star(weighted_t(spectral, at));
        gp.gscr_gap = std::abs(gp.gscr - gp.cgscr_star) / gp.cgscr_star;
        gp.p_grid_approx =
            solve_power(contour_function(b, at, stepped, ContourTarget::critical()), opts);
        gp.grid_gap = std::abs(gp.p_grid_approx - gp.p_grid) / gp.p_grid;
        out.push_back(gp);
    }
    return out;
}

double sample_std_dev(std::span<double const> values) {
    if (values.size() < 2) return 0.0;
    double const mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

StudyRow study_row(AcNetwork const& net, ConverterSet const& base, std::vector<double> control,
                   std::span<double const> grid, ContourAxes const& axes,
                   BisectionOptions const& opts) {
    ConverterSet conv = base;
    conv.control = control;
    check_converters(conv, net.size());

    StudyRow row;
    row.control = std::move(control);
    row.std_dev = sample_std_dev(row.control);
    for (auto const& gp : boundary_gaps(net, conv, grid, axes, opts)) {
        row.max_rel_error = std::max(row.max_rel_error, gp.gscr_gap);
        row.max_grid_gap = std::max(row.max_grid_gap, gp.grid_gap);
        ++row.points;
    }
    return row;
}

std::vector<StudyRow> inhomogeneity_study(AcNetwork const& net, ConverterSet const& base,
                                          std::span<std::vector<double> const> rows,
                                          std::span<double const> grid, ContourAxes const& axes,
                                          BisectionOptions const& opts) {
    std::vector<StudyRow> out;
    out.reserve(rows.size());
    for (auto const& control : rows) out.push_back(study_row(net, base, control, grid, axes, opts));
    return out;
}

}  // namespace gscr
