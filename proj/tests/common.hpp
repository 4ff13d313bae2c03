#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "tripwell/tripwell.hpp"

namespace tw_test {

inline tripwell::PotentialSpec example1() { return tripwell::PotentialSpec::triple_well(-1.0, 1.0 / 3.0, 1.0); }
inline tripwell::PotentialSpec example2() { return tripwell::PotentialSpec::triple_well(-1.0, 0.5, 1.0); }

// Smooth admissible test function on a random nonuniform grid.
inline tripwell::GridFunction random_smooth(std::size_t n, std::uint64_t seed, double amp = 0.3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    tripwell::GridFunction g;
    std::vector<double> h(n);
    double tot = 0.0;
    for (double& v : h) { v = 0.5 + U(rng); tot += v; }
    g.nodes.push_back(0.0);
    for (double v : h) g.nodes.push_back(g.nodes.back() + v / tot);
    g.nodes.back() = 1.0;
    double a1 = amp * (U(rng) - 0.5), a2 = amp * (U(rng) - 0.5), a3 = amp * (U(rng) - 0.5);
    for (double x : g.nodes)
        g.values.push_back(a1 * std::sin(M_PI * x) + a2 * std::sin(2 * M_PI * x) + a3 * std::sin(5 * M_PI * x));
    g.values.front() = 0.0;
    g.values.back() = 0.0;
    return g;
}

}  // namespace tw_test
