#pragma once

#include <random>
#include <string>
#include <vector>

#include "gscr/network.hpp"
#include "gscr/strength.hpp"

namespace fixtures {

/// Triple-infeed benchmark: z1 = 1/1.5, z2 = z3 = 1/3, z12 = z13 = z23 = 1/1.5 p.u.
inline gscr::AcNetwork cigre_triple() {
    gscr::AcNetwork net;
    net.buses = {{"1", 1.0 / 1.5, true}, {"2", 1.0 / 3.0, true}, {"3", 1.0 / 3.0, true}};
    net.branches = {{"1", "2", 1.0 / 1.5}, {"1", "3", 1.0 / 1.5}, {"2", "3", 1.0 / 1.5}};
    return net;
}

inline gscr::ConverterSet cigre_converters(std::vector<double> t = {1.24, 1.5, 1.75},
                                           std::vector<double> p = {1.0, 1.0, 1.0}) {
    return {std::move(p), std::move(t)};
}

inline gscr::AcNetwork sidc(double x) {
    gscr::AcNetwork net;
    net.buses = {{"1", x, true}};
    return net;
}

/// Random connected network with at least one grounded bus. A spanning chain
/// guarantees connectivity; extra branches and groundings are random.
inline gscr::AcNetwork random_network(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> x(0.1, 1.5);
    std::bernoulli_distribution coin(0.5);
    gscr::AcNetwork net;
    for (int i = 0; i < n; ++i) {
        gscr::BusSpec b{std::to_string(i + 1), std::nullopt, true};
        if (i == 0 || coin(rng)) b.thevenin_x = x(rng);
        net.buses.push_back(b);
    }
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        net.branches.push_back({std::to_string(pick(rng) + 1), std::to_string(i + 1), x(rng)});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng) && coin(rng))
                net.branches.push_back({std::to_string(i + 1), std::to_string(j + 1), x(rng)});
    return net;
}

inline std::vector<double> uniform_vector(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& e : v) e = d(rng);
    return v;
}

}  // namespace fixtures
