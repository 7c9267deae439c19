#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "gscr/network.hpp"

namespace gscr {

/// Weighted susceptance matrix J_eq = diag(1/P) * B together with the inputs
/// it was built from.
struct JeqMatrix {
    Eigen::MatrixXd entries;
    Eigen::MatrixXd susceptance;
    Eigen::VectorXd rated_power;

    Eigen::Index size() const noexcept { return entries.rows(); }
};

/// Eigen-decomposition of J_eq.
///
/// Eigenvalues are ascending. Column i of `right` / `left` is the right / left
/// eigenvector of eigenvalue i, normalized so that left.transpose() * right is
/// the identity. `weights(j)` is the participation of bus j in the smallest
/// mode, left(j,0) * right(j,0); the weights are positive and sum to one.
struct SpectralData {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd right;
    Eigen::MatrixXd left;
    Eigen::VectorXd weights;
    double gap = 0.0;  // eigenvalues(1) - eigenvalues(0); +inf for n = 1
    bool degenerate = false;
    std::vector<std::string> warnings;

    Eigen::Index size() const noexcept { return eigenvalues.size(); }
};

/// Simple eigen-triple (value, right vector, left vector) of some matrix.
struct EigenTriple {
    double value = 0.0;
    Eigen::VectorXd right;
    Eigen::VectorXd left;
};

struct PerturbationDiagnostics {
    double delta = 0.0;     // separation of the tracked eigenvalue from the rest
    double epsilon = 0.0;   // ||Y|| ||E|| ||X|| with the computed eigenvector matrices
    double validity = 0.0;  // 16 n eps^2 / delta^2
    double radius = 0.0;    // 4 n eps^2 / delta

    /// The disk bound is only certified when validity < 1.
    bool applicable() const noexcept { return validity < 1.0; }
};

/// Relative tolerance on lambda_2 - lambda_1 (scaled by lambda_n) below which the
/// leading eigenvalue is treated as repeated.
inline constexpr double kDegeneracyTolerance = 1e-9;

JeqMatrix build_jeq(SusceptanceMatrix const& b, std::span<double const> rated_power);

/// Solves the symmetric similar problem S = P^-1/2 B P^-1/2 and maps the
/// orthonormal eigenvectors u_i back: right = P^-1/2 u_i, left = P^1/2 u_i.
/// The right eigenvector of every mode is signed so that its largest-magnitude
/// entry is positive. A (near-)repeated lambda_1 sets `degenerate` and a warning.
SpectralData eigen_jeq(JeqMatrix const& j);

/// First-order estimate y^T (A + E) x / (y^T x) of the eigenvalue of A + E
/// that continues the simple eigenvalue described by `triple`.
double perturbed_eigenvalue(Eigen::MatrixXd const& a, Eigen::MatrixXd const& e,
                            EigenTriple const& triple);

/// Disk bound for perturbing eigenvalue `index` of a diagonalizable matrix with
/// spectrum `eigenvalues`, right eigenvectors X and left eigenvectors Y
/// (Y^T X = I), under the perturbation E.
PerturbationDiagnostics perturbation_bound(Eigen::VectorXd const& eigenvalues,
                                           Eigen::MatrixXd const& x,
                                           Eigen::MatrixXd const& y,
                                           Eigen::MatrixXd const& e, Eigen::Index index);

/// Diagnostics for J_sys = diag(T) + J_eq^-1 - J_eq viewed as a perturbation of
/// the homogeneous T_ref * I + J_eq^-1 - J_eq, whose eigenvalues are
/// T_ref + 1/lambda_i - lambda_i and whose eigenvectors are those of J_eq.
PerturbationDiagnostics perturbation_diagnostics(SpectralData const& spectral,
                                                 std::span<double const> t, double t_ref);

/// Largest singular value.
double spectral_norm(Eigen::MatrixXd const& m);

}  // namespace gscr
