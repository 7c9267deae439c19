#pragma once

// Loading experiments on a fixed network: sweeps of one converter's rated
// power, bisection for the exact (det J_sys = 0) and approximate
// (gSCR = CgSCR*) stability boundaries, two-parameter contours and the
// control-parameter inhomogeneity study.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gscr/network.hpp"
#include "gscr/strength.hpp"

namespace gscr {

/// Rated power of `bus` runs over [lo, hi]; the other converters keep their
/// base values. Without a bus, every base power is multiplied by the loading
/// value instead.
struct LoadingDirection {
    ConverterSet base;
    std::optional<std::string> bus;
    double lo = 1.0;
    double hi = 2.0;

    ConverterSet at(AcNetwork const& net, double p) const;
};

struct SweepSample {
    double p = 0.0;
    std::optional<StrengthReport> report;  // empty when analysis failed
    std::string error;
};

struct SweepResult {
    std::vector<SweepSample> samples;
    bool gscr_strictly_decreasing = true;
    double cgscr_star_variation = 0.0;  // (max - min) / min over successful samples
    std::size_t failed = 0;
    std::vector<std::string> warnings;
};

struct BisectionOptions {
    double tol = 1e-8;
    int max_expansions = 60;
    int max_iterations = 200;
};

struct BoundaryComparison {
    double p_exact = 0.0;
    double p_approx = 0.0;
    double rel_error = 0.0;
};

struct ContourTarget {
    enum class Kind { Gscr, Critical, Singular };
    Kind kind = Kind::Gscr;
    double value = 0.0;  // used by Kind::Gscr

    static ContourTarget gscr(double v) { return {Kind::Gscr, v}; }
    static ContourTarget critical() { return {Kind::Critical, 0.0}; }
    static ContourTarget singular() { return {Kind::Singular, 0.0}; }

    /// "2.1", "critical" or "singular".
    std::string label() const;
    /// Inverse of label(); also accepts "cgscr" / "cgscr_star" for critical.
    static ContourTarget parse(std::string const& text);
};

/// Which converter is solved for (P_N1 in the two-parameter figure) and which
/// one is stepped over the grid (P_N2).
struct ContourAxes {
    std::string solve_bus;
    std::string grid_bus;
};

struct ContourPoint {
    double p_grid = 0.0;
    double p_solve = 0.0;
    ContourTarget target;
};

struct ContourResult {
    std::vector<ContourPoint> points;
    std::vector<std::string> skipped;  // one diagnostic per grid value without a root
};

/// Exact and approximate boundary evaluated along the singular contour.
struct BoundaryGapPoint {
    double p_grid = 0.0;
    double p_solve = 0.0;         // singular J_sys
    double gscr = 0.0;            // at (p_solve, p_grid)
    double cgscr_star = 0.0;
    double gscr_gap = 0.0;        // |gscr - cgscr_star| / cgscr_star
    double p_grid_approx = 0.0;   // gSCR = CgSCR* with p_solve held fixed
    double grid_gap = 0.0;        // |p_grid_approx - p_grid| / p_grid
};

struct StudyRow {
    std::vector<double> control;
    double std_dev = 0.0;
    double max_rel_error = 0.0;   // max gscr_gap over the contour
    double max_grid_gap = 0.0;    // max grid_gap over the contour
    std::size_t points = 0;
};

/// Finds a root of a function that is positive at `lo` and negative somewhere
/// to the right. The first sign change on a uniform pre-scan is refined by
/// bisection until the bracket is no wider than `tol`.
double bisect_first_crossing(std::function<double(double)> const& f, double lo, double hi,
                             double tol, int max_iterations = 200, int scan = 64);

SweepResult sweep(AcNetwork const& net, LoadingDirection const& dir, int steps,
                  AnalysisOptions const& opts = {});

/// First loading at which `value` changes sign between consecutive successful
/// samples, located by linear interpolation.
std::optional<double> sweep_crossing(SweepResult const& s,
                                     std::function<double(StrengthReport const&)> const& value);

/// Loading at which det(J_sys) first changes sign.
double find_exact_boundary(AcNetwork const& net, LoadingDirection const& dir,
                           BisectionOptions const& opts = {});

/// Loading at which gSCR - CgSCR* first changes sign.
double find_approx_boundary(AcNetwork const& net, LoadingDirection const& dir,
                            BisectionOptions const& opts = {});

BoundaryComparison compare_boundaries(AcNetwork const& net, LoadingDirection const& dir,
                                      BisectionOptions const& opts = {});

ContourResult gscr_contour(AcNetwork const& net, ConverterSet const& conv,
                           ContourTarget const& target, std::span<double const> grid,
                           ContourAxes const& axes, BisectionOptions const& opts = {});

std::vector<BoundaryGapPoint> boundary_gaps(AcNetwork const& net, ConverterSet const& conv,
                                            std::span<double const> grid,
                                            ContourAxes const& axes,
                                            BisectionOptions const& opts = {});

/// Sample standard deviation (divisor n - 1); zero for fewer than two values.
double sample_std_dev(std::span<double const> values);

StudyRow study_row(AcNetwork const& net, ConverterSet const& base, std::vector<double> control,
                   std::span<double const> grid, ContourAxes const& axes,
                   BisectionOptions const& opts = {});

std::vector<StudyRow> inhomogeneity_study(AcNetwork const& net, ConverterSet const& base,
                                          std::span<std::vector<double> const> rows,
                                          std::span<double const> grid, ContourAxes const& axes,
                                          BisectionOptions const& opts = {});

/// Evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace gscr
