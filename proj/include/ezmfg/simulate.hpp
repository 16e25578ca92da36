#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ezmfg/fpk.hpp"
#include "ezmfg/grid.hpp"
#include "ezmfg/hjb.hpp"
#include "ezmfg/model.hpp"

namespace ezmfg {

struct SimConfig {
    long n_agents = 100000;
    double t_end = 500.0;
    double dt = 0.025;  // must stay below 0.01 min(1/lam_1, 1/lam_2)
    double burn_in = 250.0;
    std::uint64_t seed = 1;
    bool parallel = true;
};

struct EmpiricalMeasure {
    std::vector<double> wealth;       // per agent, at t_end
    std::vector<std::uint8_t> state;  // income state per agent, 0 or 1
    // share of the whole panel sitting within one grid cell of x_low,
    // split by income state
    std::array<double, 2> boundary_fraction{0.0, 0.0};
};

// Euler panel simulation of the wealth dynamics under the solved saving
// policies: x <- max(x_low, x + s(x, state) dt), then the income state
// flips with probability lam_state dt. Policies are interpolated linearly
// between grid nodes and held at the last nodal value beyond x_max. The
// panel starts at x_low with states split by the chain's stationary
// shares, and every path is a deterministic function of (seed, agent).
EmpiricalMeasure simulate(const HjbSolution& sol, const ModelParams& p, const Grid& grid,
                          const SimConfig& cfg);

struct DistanceReport {
    std::array<double, 2> ks{0.0, 0.0};  // sup_x |empirical sub-CDF - G_j(x)| per state
    double boundary_gap = 0.0;           // |mu_1 - low-state boundary fraction|
    std::array<double, 2> occupancy{0.0, 0.0};
};

// Kolmogorov-Smirnov distance per income state between the empirical
// sub-CDFs and G_j(x) = mu_j + int g_j, plus the boundary-mass comparison.
DistanceReport compare(const EmpiricalMeasure& emp, const StationaryMeasure& m, const Grid& grid);

// two-sample KS distance per state between empirical panels
std::array<double, 2> ks_between(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

}  // namespace ezmfg
