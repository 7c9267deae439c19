#include "gscr/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <utility>

namespace gscr {

std::optional<std::size_t> AcNetwork::index_of(std::string_view id) const noexcept {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == id) return i;
    }
    return std::nullopt;
}

std::size_t AcNetwork::require_index(std::string_view id) const {
    if (auto idx = index_of(id)) return *idx;
    throw Error(ErrorCode::UnknownBus, "unknown bus id '" + std::string(id) + "'");
}

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::string branch_name(Branch const& br) { return br.from + "-" + br.to; }

}  // namespace

std::vector<Diagnostic> validate(AcNetwork const& net) {
    std::vector<Diagnostic> out;
    if (net.buses.empty()) {
        out.push_back({ErrorCode::InvalidArgument, "", "network has no buses"});
        return out;
    }

    std::set<std::string_view> seen;
    for (auto const& bus : net.buses) {
        if (!seen.insert(bus.id).second) {
            out.push_back({ErrorCode::DuplicateBus, bus.id, "bus id appears more than once"});
        }
        if (bus.thevenin_x && !positive_finite(*bus.thevenin_x)) {
            out.push_back({ErrorCode::NonPositiveReactance, bus.id,
                           "thevenin_x must be a finite positive reactance"});
        }
    }

    // Adjacency over valid branches only; invalid ones are reported but do not
    // count towards connectivity.
    std::vector<std::vector<std::size_t>> adj(net.buses.size());
    for (auto const& br : net.branches) {
        auto from = net.index_of(br.from);
        auto to = net.index_of(br.to);
        bool ok = true;
        if (!from || !to) {
            out.push_back({ErrorCode::UnknownBus, branch_name(br),
                           "branch endpoint '" + (from ? br.to : br.from) + "' does not exist"});
            ok = false;
        } else if (*from == *to) {
            out.push_back({ErrorCode::SelfLoop, branch_name(br), "branch connects a bus to itself"});
            ok = false;
        }
        if (!positive_finite(br.x)) {
            out.push_back({ErrorCode::NonPositiveReactance, branch_name(br),
                           "branch x must be a finite positive reactance"});
            ok = false;
        }
        if (ok) {
            adj[*from].push_back(*to);
            adj[*to].push_back(*from);
        }
    }

    // Every bus needs a path to the ground node through a grounding reactance.
    std::vector<bool> reached(net.buses.size(), false);
    std::queue<std::size_t> frontier;
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        auto const& tx = net.buses[i].thevenin_x;
        if (tx && positive_finite(*tx)) {
            reached[i] = true;
            frontier.push(i);
        }
    }
    while (!frontier.empty()) {
        auto i = frontier.front();
        frontier.pop();
        for (auto j : adj[i]) {
            if (!reached[j]) {
                reached[j] = true;
                frontier.push(j);
            }
        }
    }
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        if (!reached[i]) {
            out.push_back({ErrorCode::DisconnectedFromGround, net.buses[i].id,
                           "bus has no path to ground"});
        }
    }
    return out;
}

AcNetwork merge_parallel(AcNetwork const& net) {
    AcNetwork out;
    out.buses = net.buses;
    std::map<std::pair<std::string, std::string>, std::size_t> slot;
    std::vector<double> susceptance;
    for (auto const& br : net.branches) {
        auto key = std::minmax(br.from, br.to);
        auto [it, inserted] = slot.try_emplace({key.first, key.second}, out.branches.size());
        if (inserted) {
            out.branches.push_back(br);
            susceptance.push_back(1.0 / br.x);
        } else {
            susceptance[it->second] += 1.0 / br.x;
        }
    }
    for (std::size_t k = 0; k < out.branches.size(); ++k) {
        out.branches[k].x = 1.0 / susceptance[k];
    }
    return out;
}

SusceptanceMatrix build_susceptance(AcNetwork const& net) {
    auto diags = validate(net);
    if (!diags.empty()) {
        auto const& d = diags.front();
        throw Error(d.code, d.subject.empty() ? d.message : d.subject + ": " + d.message);
    }

    auto const n = static_cast<Eigen::Index>(net.size());
    SusceptanceMatrix b{Eigen::MatrixXd::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (auto const& tx = net.buses[i].thevenin_x) b.entries(i, i) += 1.0 / *tx;
    }
    for (auto const& br : net.branches) {
        auto i = static_cast<Eigen::Index>(*net.index_of(br.from));
        auto j = static_cast<Eigen::Index>(*net.index_of(br.to));
        double const y = 1.0 / br.x;
        b.entries(i, i) += y;
        b.entries(j, j) += y;
        b.entries(i, j) -= y;
        b.entries(j, i) -= y;
    }
    return b;
}

AcNetwork kron_reduce(AcNetwork const& net, std::span<std::string const> keep) {
    auto const full = build_susceptance(net);

    std::vector<bool> kept(net.size(), false);
    for (auto const& id : keep) kept[net.require_index(id)] = true;

    std::vector<Eigen::Index> k_idx, e_idx;
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (kept[i]) {
            k_idx.push_back(static_cast<Eigen::Index>(i));
        } else if (net.buses[i].is_converter) {
            throw Error(ErrorCode::EliminatingConverterBus,
                        "bus '" + net.buses[i].id + "' carries a converter and cannot be eliminated");
        } else {
            e_idx.push_back(static_cast<Eigen::Index>(i));
        }
    }
    if (k_idx.empty()) {
        throw Error(ErrorCode::InvalidArgument, "kron_reduce: nothing to keep");
    }
    if (e_idx.empty()) return net;

    Eigen::MatrixXd b_kk = full.entries(k_idx, k_idx);
    Eigen::MatrixXd b_ke = full.entries(k_idx, e_idx);
    Eigen::MatrixXd b_ee = full.entries(e_idx, e_idx);

    // B_ee is symmetric positive definite for a grounded network; LLT failure
    // or a tiny pivot means the interior block cannot be eliminated.
    Eigen::LLT<Eigen::MatrixXd> llt(b_ee);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
        throw Error(ErrorCode::SingularInteriorBlock, "eliminated block is numerically singular");
    }
    Eigen::MatrixXd reduced = b_kk - b_ke * llt.solve(b_ke.transpose());
    reduced = 0.5 * (reduced + reduced.transpose()).eval();

    AcNetwork out;
    auto const m = reduced.rows();
    double const tiny = 1e-13 * reduced.diagonal().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < m; ++i) {
        BusSpec bus = net.buses[static_cast<std::size_t>(k_idx[i])];
        double const ground = reduced.row(i).sum();
        if (ground > tiny) {
            bus.thevenin_x = 1.0 / ground;
        } else {
            bus.thevenin_x.reset();
        }
        out.buses.push_back(std::move(bus));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            if (-reduced(i, j) > tiny) {
                out.branches.push_back(
                    {out.buses[i].id, out.buses[j].id, -1.0 / reduced(i, j)});
            }
        }
    }
    return out;
}

AcNetwork reduce_to_converters(AcNetwork const& net) {
    std::vector<std::string> keep;
    for (auto const& bus : net.buses) {
        if (bus.is_converter) keep.push_back(bus.id);
    }
    return kron_reduce(net, keep);
}

}  // namespace gscr
