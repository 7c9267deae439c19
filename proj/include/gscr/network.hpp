#pragma once

// Reduced AC grid seen from the converter buses: bus grounding (Thevenin)
// reactances, inter-bus branch reactances, and the nodal susceptance matrix
// built from them. All quantities are in per unit.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gscr/error.hpp"

namespace gscr {

struct Branch {
    std::string from;
    std::string to;
    double x = 0.0;  // series reactance, p.u.
};

struct BusSpec {
    std::string id;
    std::optional<double> thevenin_x;  // grounding reactance, p.u.
    bool is_converter = true;
};

struct AcNetwork {
    std::vector<BusSpec> buses;
    std::vector<Branch> branches;

    std::size_t size() const noexcept { return buses.size(); }
    std::optional<std::size_t> index_of(std::string_view id) const noexcept;
    /// Throws Error{UnknownBus} when absent.
    std::size_t require_index(std::string_view id) const;
};

/// One violation found by validate(). `subject` names the bus or branch.
struct Diagnostic {
    ErrorCode code;
    std::string subject;
    std::string message;
};

/// Nodal susceptance matrix with positive diagonal:
/// B_ii = 1/x_gi + sum_j 1/x_ij, B_ij = -1/x_ij.
struct SusceptanceMatrix {
    Eigen::MatrixXd entries;

    Eigen::Index size() const noexcept { return entries.rows(); }
};

/// Lists every invariant violation. Never throws.
std::vector<Diagnostic> validate(AcNetwork const& net);

/// Combines parallel branches between the same unordered bus pair into one
/// branch with x = 1 / sum(1/x_k). Branch order follows first appearance.
AcNetwork merge_parallel(AcNetwork const& net);

/// Throws the first diagnostic reported by validate().
SusceptanceMatrix build_susceptance(AcNetwork const& net);

/// Eliminates every bus not listed in `keep` by a Schur complement on B and
/// recovers the equivalent branch and grounding reactances. Bus order of the
/// result follows the input order.
AcNetwork kron_reduce(AcNetwork const& net, std::span<std::string const> keep);

/// Kron reduction onto the converter buses.
AcNetwork reduce_to_converters(AcNetwork const& net);

}  // namespace gscr
