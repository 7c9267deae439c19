#include "gscr/strength.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace gscr {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Marginal: return "marginal";
        case Verdict::Unstable: return "unstable";
    }
    return "unknown";
}

std::string_view to_string(TRef t) noexcept {
    return t == TRef::TStar ? "t_star" : "mean";
}

void check_converters(ConverterSet const& conv, std::size_t n) {
    if (conv.rated_power.size() != n || conv.control.size() != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "converter set has " + std::to_string(conv.rated_power.size()) + " powers and " +
                        std::to_string(conv.control.size()) + " control parameters for " +
                        std::to_string(n) + " buses");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::isfinite(conv.rated_power[i]) && conv.rated_power[i] > 0.0)) {
            throw Error(ErrorCode::NonPositiveRatedPower,
                        "rated power at position " + std::to_string(i) + " must be positive");
        }
        if (!std::isfinite(conv.control[i])) {
            throw Error(ErrorCode::NonFiniteParameter,
                        "control parameter at position " + std::to_string(i) + " is not finite");
        }
    }
}

double gscr(SpectralData const& spectral) { return spectral.eigenvalues(0); }

double weighted_t(SpectralData const& spectral, ConverterSet const& conv) {
    if (static_cast<Eigen::Index>(conv.control.size()) != spectral.weights.size()) {
        throw Error(ErrorCode::DimensionMismatch, "weighted_t: size mismatch");
    }
    // Homogeneous T must come back bit-exact, independent of weight rounding.
    bool homogeneous = true;
    for (double t : conv.control) homogeneous = homogeneous && t == conv.control.front();
    if (homogeneous) return conv.control.front();

    double acc = 0.0;
    for (Eigen::Index j = 0; j < spectral.weights.size(); ++j) {
        acc += spectral.weights(j) * conv.control[static_cast<std::size_t>(j)];
    }
    return acc;
}

double cgscr_star(double t_star) {
    double const half = 0.5 * t_star;
    double const root = std::sqrt(half * half + 1.0);
    // For negative T* the textbook form cancels; use the product of roots = -1.
    return half >= 0.0 ? half + root : 1.0 / (root - half);
}

Eigen::MatrixXd jsys_exact(JeqMatrix const& j, ConverterSet const& conv) {
    check_converters(conv, static_cast<std::size_t>(j.size()));
    auto const n = j.size();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(j.entries);
    Eigen::MatrixXd const jinv = lu.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::VectorXd t = Eigen::Map<Eigen::VectorXd const>(conv.control.data(), n);
    Eigen::MatrixXd out = jinv - j.entries;
    out.diagonal() += t;
    return out;
}

double lambda_crit_approx(SpectralData const& spectral, ConverterSet const& conv) {
    if (spectral.degenerate) {
        throw Error(ErrorCode::DegenerateLeadingEigenvalue,
                    "lambda_1 of J_eq is not simple; the approximation is undefined");
    }
    double const lam = gscr(spectral);
    return weighted_t(spectral, conv) + 1.0 / lam - lam;
}

double critical_eigenvalue(Eigen::MatrixXd const& jsys, double near) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(jsys, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::InvalidArgument, "J_sys eigensolver did not converge");
    }
    auto const& ev = solver.eigenvalues();
    Eigen::Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double const d = std::abs(ev(i) - std::complex<double>(near, 0.0));
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return ev(best).real();
}

double jsys_determinant(SusceptanceMatrix const& b, ConverterSet const& conv) {
    auto const j = build_jeq(b, conv.rated_power);
    return jsys_exact(j, conv).partialPivLu().determinant();
}

StrengthReport analyze(SusceptanceMatrix const& b, ConverterSet const& conv,
                       AnalysisOptions const& opts) {
    check_converters(conv, static_cast<std::size_t>(b.size()));
    auto const j = build_jeq(b, conv.rated_power);
    auto const spectral = eigen_jeq(j);

    StrengthReport r;
    r.warnings = spectral.warnings;
    r.eigenvalues = spectral.eigenvalues;
    r.weights = spectral.weights;
    r.gscr = gscr(spectral);
    r.t_star = weighted_t(spectral, conv);
    r.cgscr_star = cgscr_star(r.t_star);
    r.margin = r.gscr - r.cgscr_star;
    r.lambda_crit_approx = r.t_star + 1.0 / r.gscr - r.gscr;
    r.lambda_crit_exact = critical_eigenvalue(jsys_exact(j, conv), r.lambda_crit_approx);

    r.t_ref = opts.t_ref == TRef::TStar
                  ? r.t_star
                  : std::accumulate(conv.control.begin(), conv.control.end(), 0.0) /
                        static_cast<double>(conv.size());
    if (spectral.degenerate) {
        double const inf = std::numeric_limits<double>::infinity();
        r.diagnostics = {0.0, inf, inf, inf};
    } else {
        r.diagnostics = perturbation_diagnostics(spectral, conv.control, r.t_ref);
    }

    if (r.margin > opts.margin_tol) {
        r.verdict = spectral.degenerate ? Verdict::Marginal : Verdict::Stable;
    } else if (r.margin < -opts.margin_tol) {
        r.verdict = Verdict::Unstable;
    } else {
        r.verdict = Verdict::Marginal;
    }
    return r;
}

StrengthReport analyze(AcNetwork const& net, ConverterSet const& conv,
                       AnalysisOptions const& opts) {
    for (auto const& bus : net.buses) {
        if (!bus.is_converter) {
            throw Error(ErrorCode::NonConverterBus,
                        "bus '" + bus.id + "' has no converter; Kron-reduce it out first");
        }
    }
    return analyze(build_susceptance(net), conv, opts);
}

}  // namespace gscr
