#pragma once

// Test-only reference computations. Nothing here calls into the library's
// eigen or bisection code paths.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

struct SymEigen {
    std::vector<double> values;           // ascending
    std::vector<Eigen::VectorXd> vectors;  // unit norm, matching values
};

/// Cyclic Jacobi rotations on a symmetric matrix.
inline SymEigen jacobi(Eigen::MatrixXd a, double tol = 1e-15, int max_sweeps = 100) {
    auto const n = a.rows();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off <= tol * tol * a.squaredNorm()) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                double const theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double const t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double const c = 1.0 / std::sqrt(t * t + 1.0);
                double const s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    double const akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    double const apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    double const vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });
    SymEigen out;
    for (auto i : order) {
        out.values.push_back(a(i, i));
        out.vectors.push_back(v.col(i));
    }
    return out;
}

/// Eigenvalues of diag(1/p) * b via the symmetric similar matrix, Jacobi route.
inline std::vector<double> weighted_eigenvalues(Eigen::MatrixXd const& b,
                                                std::vector<double> const& p) {
    auto const n = b.rows();
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) s(i, j) = b(i, j) / std::sqrt(p[i] * p[j]);
    return jacobi(s).values;
}

/// Largest eigenvalue of diag(t) + J^-1 - J with J = diag(1/p) b, from the
/// symmetric similar form diag(t) + S^-1 - S and Jacobi.
inline double jsys_critical(Eigen::MatrixXd const& b, std::vector<double> const& p,
                            std::vector<double> const& t) {
    auto const n = b.rows();
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) s(i, j) = b(i, j) / std::sqrt(p[i] * p[j]);
    Eigen::MatrixXd m = s.inverse() - s;
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) += t[i];
    m = 0.5 * (m + m.transpose()).eval();
    return jacobi(m).values.back();
}

/// Plain bisection on a sign change, no pre-scan.
template <class F>
double bisect(F f, double lo, double hi, double tol = 1e-12) {
    double flo = f(lo);
    while (hi - lo > tol) {
        double const mid = 0.5 * (lo + hi);
        double const fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(std::vector<double> const& x, std::vector<double> const& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto const n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double const lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
