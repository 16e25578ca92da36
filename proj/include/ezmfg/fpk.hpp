#pragma once

#include <array>
#include <vector>

#include "ezmfg/grid.hpp"
#include "ezmfg/hjb.hpp"
#include "ezmfg/model.hpp"

namespace ezmfg {

// Stationary distribution of the forward equation. Each income state j
// carries a density g[j] on the interior nodes plus an atom mu[j] at x_low
// (only the low-income state can hold mass there in the non-degenerate
// case). cdf[j][k] is the total state-j mass on [x_low, x_k], atom
// included, so cdf[j].back() == mass[j].
struct StationaryMeasure {
    std::array<std::vector<double>, 2> g;
    std::array<double, 2> mu{0.0, 0.0};
    std::array<std::vector<double>, 2> cdf;
    double support_end = 0.0;
    bool degenerate = false;
    std::array<double, 2> mass{0.0, 0.0};
};

// Location where the high-income saving policy crosses zero, by linear
// interpolation between the bracketing nodes. Requires s2 > 0 at x_low;
// throws NoCrossing if the policy stays positive on the whole grid.
double find_xhat(const std::vector<double>& s2, const Grid& grid);

// Integrating-factor solution of the stationary forward equation. The
// quadrature runs in u = sqrt(x - x_low), where the boundary singularity
// of 1/s1 is removable and the clustered nodes are evenly spaced.
StationaryMeasure closed_form_measure(const HjbSolution& sol,
                                      const ModelParams& p,
                                      const Grid& grid);

// Stationary measure of the discrete generator actually used by the value
// iteration: solves L^T m = 0 with the mass normalized to one. Serves as
// an independent cross-check of the closed form.
StationaryMeasure adjoint_measure(const HjbSolution& sol,
                                  const ModelParams& p,
                                  const Grid& grid);

// Node masses (atom at node 0, trapezoid-weighted density elsewhere).
std::array<std::vector<double>, 2> node_masses(const StationaryMeasure& m,
                                               const Grid& grid);

// Net probability flux through each cell interface k+1/2 implied by the
// upwind transport of the given node masses. Zero (to rounding) at every
// interface when the masses are stationary for the discrete generator.
std::vector<double> interface_flux(const HjbSolution& sol, const Grid& grid,
                                   const std::array<std::vector<double>, 2>& masses);

// E[x] under the stationary measure: atoms at x_low plus cell masses
// recovered from the cdf, attributed to cell midpoints.
double aggregate_capital(const StationaryMeasure& m, const Grid& grid);

// Effective labor supply under the stationary income process.
double aggregate_labor(const ModelParams& p);

}  // namespace ezmfg
