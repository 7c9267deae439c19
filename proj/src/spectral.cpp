#include "gscr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gscr {

JeqMatrix build_jeq(SusceptanceMatrix const& b, std::span<double const> rated_power) {
    auto const n = b.size();
    if (static_cast<Eigen::Index>(rated_power.size()) != n || n == 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    "rated power vector has " + std::to_string(rated_power.size()) +
                        " entries for a " + std::to_string(n) + "-bus susceptance matrix");
    }
    Eigen::VectorXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double const pi = rated_power[static_cast<std::size_t>(i)];
        if (!(std::isfinite(pi) && pi > 0.0)) {
            throw Error(ErrorCode::NonPositiveRatedPower,
                        "rated power at position " + std::to_string(i) + " must be positive");
        }
        p(i) = pi;
    }
    JeqMatrix j;
    j.entries = p.cwiseInverse().asDiagonal() * b.entries;
    j.susceptance = b.entries;
    j.rated_power = std::move(p);
    return j;
}

SpectralData eigen_jeq(JeqMatrix const& j) {
    auto const n = j.size();
    if (n == 0 || j.rated_power.size() != n || j.susceptance.rows() != n) {
        throw Error(ErrorCode::DimensionMismatch, "J_eq provenance is missing or inconsistent");
    }

    Eigen::VectorXd const inv_sqrt_p = j.rated_power.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd s = inv_sqrt_p.asDiagonal() * j.susceptance * inv_sqrt_p.asDiagonal();
    s = 0.5 * (s + s.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::InvalidArgument, "symmetric eigensolver did not converge");
    }
    Eigen::MatrixXd u = solver.eigenvectors();

    SpectralData out;
    out.eigenvalues = solver.eigenvalues();
    out.right = inv_sqrt_p.asDiagonal() * u;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index argmax = 0;
        out.right.col(k).cwiseAbs().maxCoeff(&argmax);
        if (out.right(argmax, k) < 0.0) {
            out.right.col(k) *= -1.0;
            u.col(k) *= -1.0;
        }
    }
    out.left = j.rated_power.cwiseSqrt().asDiagonal() * u;
    out.weights = u.col(0).cwiseAbs2();

    if (n == 1) {
        out.gap = std::numeric_limits<double>::infinity();
    } else {
        out.gap = out.eigenvalues(1) - out.eigenvalues(0);
        if (out.gap < kDegeneracyTolerance * std::abs(out.eigenvalues(n - 1))) {
            out.degenerate = true;
            out.warnings.push_back(
                "DegenerateLeadingEigenvalue: lambda_2 - lambda_1 is below tolerance; "
                "participation weights and the perturbation bound are not reliable");
        }
    }
    return out;
}

double perturbed_eigenvalue(Eigen::MatrixXd const& a, Eigen::MatrixXd const& e,
                            EigenTriple const& triple) {
    auto const n = a.rows();
    if (a.cols() != n || e.rows() != n || e.cols() != n || triple.right.size() != n ||
        triple.left.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "perturbed_eigenvalue: inconsistent sizes");
    }
    double const yx = triple.left.dot(triple.right);
    if (std::abs(yx) < 1e-12 * triple.left.norm() * triple.right.norm()) {
        throw Error(ErrorCode::BiorthogonalityBreakdown,
                    "left and right eigenvectors are (nearly) orthogonal");
    }
    return triple.left.dot((a + e) * triple.right) / yx;
}

double spectral_norm(Eigen::MatrixXd const& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

PerturbationDiagnostics perturbation_bound(Eigen::VectorXd const& eigenvalues,
                                           Eigen::MatrixXd const& x,
                                           Eigen::MatrixXd const& y,
                                           Eigen::MatrixXd const& e, Eigen::Index index) {
    auto const n = eigenvalues.size();
    if (x.rows() != n || x.cols() != n || y.rows() != n || y.cols() != n || e.rows() != n ||
        e.cols() != n || index < 0 || index >= n) {
        throw Error(ErrorCode::DimensionMismatch, "perturbation_bound: inconsistent sizes");
    }

    PerturbationDiagnostics d;
    d.delta = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i != index) d.delta = std::min(d.delta, std::abs(eigenvalues(index) - eigenvalues(i)));
    }
    d.epsilon = spectral_norm(y) * spectral_norm(e) * spectral_norm(x);

    if (d.epsilon == 0.0 || std::isinf(d.delta)) {
        // Unperturbed or scalar: the first-order estimate is exact.
        d.validity = 0.0;
        d.radius = 0.0;
        return d;
    }
    if (d.delta == 0.0) {
        throw Error(ErrorCode::DegenerateLeadingEigenvalue, "tracked eigenvalue is not simple");
    }
    double const nn = static_cast<double>(n);
    double const eps2 = d.epsilon * d.epsilon;
    d.validity = 16.0 * nn * eps2 / (d.delta * d.delta);
    d.radius = 4.0 * nn * eps2 / d.delta;
    return d;
}

PerturbationDiagnostics perturbation_diagnostics(SpectralData const& spectral,
                                                 std::span<double const> t, double t_ref) {
    auto const n = spectral.size();
    if (static_cast<Eigen::Index>(t.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "control parameter vector size mismatch");
    }
    if (spectral.degenerate) {
        throw Error(ErrorCode::DegenerateLeadingEigenvalue,
                    "lambda_1 of J_eq is not simple; the perturbation bound does not apply");
    }

    Eigen::VectorXd mode(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double const lam = spectral.eigenvalues(i);
        mode(i) = t_ref + 1.0 / lam - lam;
    }
    Eigen::VectorXd shift(n);
    for (Eigen::Index i = 0; i < n; ++i) shift(i) = t[static_cast<std::size_t>(i)] - t_ref;
    Eigen::MatrixXd const e = shift.asDiagonal();

    return perturbation_bound(mode, spectral.right, spectral.left, e, 0);
}

}  // namespace gscr
