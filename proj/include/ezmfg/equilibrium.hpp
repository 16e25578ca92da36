#pragma once

#include <utility>
#include <vector>

#include "ezmfg/fpk.hpp"
#include "ezmfg/grid.hpp"
#include "ezmfg/hjb.hpp"
#include "ezmfg/model.hpp"

namespace ezmfg {

enum class Coupling { aiyagari, huggett };

struct EquilibriumOpts {
    double r_lo = 1e-3;
    double r_hi = -1.0;  // < 0 means rho - 1e-3
    double tol_r = 1e-6;
    int max_bisect = 60;
    SolveOpts solve{};
    Mode mode = Mode::strict;
};

struct EquilibriumResult {
    double r_star = 0.0;
    double K = 0.0;       // aggregate capital at r_star
    double N = 0.0;       // aggregate labor (measure-independent)
    double residual = 0.0;  // |K - K_d| or |K - B|
    std::pair<double, double> bracket{0.0, 0.0};
    int evaluations = 0;  // capital-supply solves spent
    HjbSolution solution;
    StationaryMeasure measure;
};

// Firm's capital demand K_d = N (A alpha / (r + delta))^{1/(1-alpha)},
// the Cobb-Douglas first-order condition.
double capital_demand(double r, const ProductionParams& prod, double labor);

// Household capital supply: solve the HJB at r, build the stationary
// measure, integrate. Returns x_low outright when the boundary classifier
// already shows the high-income state cannot save (pure Dirac regime).
double capital_supply(const ModelParams& p, double r, const Grid& grid,
                      const SolveOpts& opts = {}, Mode mode = Mode::strict);

// Sufficient condition for existence of an Aiyagari equilibrium:
// rho/(theta lam_2) > (y_2/y_1)^{1/psi} - 1. Only sufficient; the
// benchmark equilibria exist even where it fails.
bool existence_condition(const ModelParams& p);

// Bisection on excess supply K(r) - K_d(r) (aiyagari) or K(r) - B
// (huggett). The bracket expands toward rho when supply is still short at
// r_hi; throws NoBracket when no sign change can be found.
EquilibriumResult solve_equilibrium(const ModelParams& p, const ProductionParams& prod,
                                    const Grid& grid, Coupling coupling,
                                    const EquilibriumOpts& opts = {});

// K(r) along an increasing sequence approaching rho, for the blow-up
// diagnostic; each entry is (r, K(r)).
std::vector<std::pair<double, double>> blowup_diagnostic(const ModelParams& p,
                                                         const std::vector<double>& rs,
                                                         const Grid& grid,
                                                         const SolveOpts& opts = {},
                                                         Mode mode = Mode::strict);

}  // namespace ezmfg
