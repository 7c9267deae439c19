#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gscr/network.hpp"
#include "gscr/spectral.hpp"

namespace gscr {

/// Per-bus converter data, aligned with AcNetwork::buses.
struct ConverterSet {
    std::vector<double> rated_power;  // P_N, p.u.
    std::vector<double> control;      // T, dimensionless

    std::size_t size() const noexcept { return rated_power.size(); }
};

enum class Verdict { Stable, Marginal, Unstable };
std::string_view to_string(Verdict v) noexcept;

/// Centre of the homogeneous reference system used for the perturbation bound.
enum class TRef { TStar, Mean };
std::string_view to_string(TRef t) noexcept;

struct AnalysisOptions {
    TRef t_ref = TRef::TStar;
    double margin_tol = 1e-6;
};

struct StrengthReport {
    double gscr = 0.0;
    double t_star = 0.0;
    double cgscr_star = 0.0;
    double margin = 0.0;  // gscr - cgscr_star
    double lambda_crit_approx = 0.0;
    double lambda_crit_exact = 0.0;
    double t_ref = 0.0;
    PerturbationDiagnostics diagnostics;
    Verdict verdict = Verdict::Marginal;
    Eigen::VectorXd eigenvalues;  // of J_eq, ascending
    Eigen::VectorXd weights;
    std::vector<std::string> warnings;
};

/// Throws when sizes differ from the network or any P_N / T is invalid.
void check_converters(ConverterSet const& conv, std::size_t n);

/// Smallest eigenvalue of J_eq.
double gscr(SpectralData const& spectral);

/// Participation-weighted control parameter sum_j w_j T_j.
double weighted_t(SpectralData const& spectral, ConverterSet const& conv);

/// Positive root of lambda^2 - t_star * lambda - 1 = 0.
double cgscr_star(double t_star);

/// diag(T) + J_eq^-1 - J_eq; the inverse comes from an LU solve.
Eigen::MatrixXd jsys_exact(JeqMatrix const& j, ConverterSet const& conv);

/// T* + 1/lambda_1 - lambda_1. Zero exactly when gSCR = CgSCR*.
double lambda_crit_approx(SpectralData const& spectral, ConverterSet const& conv);

/// Real eigenvalue of `jsys` closest to `near`, from a general (non-symmetric)
/// eigensolve of the assembled matrix.
double critical_eigenvalue(Eigen::MatrixXd const& jsys, double near);

/// Determinant of J_sys at the given converter data. Shared by the exact
/// boundary search.
double jsys_determinant(SusceptanceMatrix const& b, ConverterSet const& conv);

/// Full assessment: B -> J_eq -> spectrum -> gSCR, T*, CgSCR* -> J_sys -> bound.
StrengthReport analyze(AcNetwork const& net, ConverterSet const& conv,
                       AnalysisOptions const& opts = {});

/// Same as analyze() with B already built; used by the boundary searches.
StrengthReport analyze(SusceptanceMatrix const& b, ConverterSet const& conv,
                       AnalysisOptions const& opts = {});

}  // namespace gscr
