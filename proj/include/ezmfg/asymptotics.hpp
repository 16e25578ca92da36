#pragma once

#include <array>
#include <utility>

#include "ezmfg/grid.hpp"
#include "ezmfg/hjb.hpp"
#include "ezmfg/model.hpp"

namespace ezmfg {

// Far-field expansion of the saving policies at r = rho:
//   s_j(x) = s_j_inf + B_j (rho x + y_j)^{-1} + o(x^{-1}),
// with s_j_inf = lam_j (y_j - y_jbar) / (rho + lam_1 + lam_2). zhat and
// qhat are the value-correction profiles behind the expansion; Qhat are
// the constants solving the limiting Hamilton-Jacobi system.
struct FarFieldExpansion {
    std::array<double, 2> leading;
    std::array<double, 2> second_order_coeff;
    std::array<double, 2> Qhat;
    ModelParams params;

    double zhat(double x, int j) const;  // lam_j (rho x + y_j)^{-gamma} (y_jbar - y_j) / L
    double qhat(double x, int j) const;  // -Qhat_j (rho x + y_j)^{-1-gamma}
};

FarFieldExpansion far_field_expansion(const ModelParams& p);

// Leading plus second-order term of the expansion at wealth x, state j.
double far_field_saving(double x, int j, const ModelParams& p);

struct FarFieldReport {
    double max_rel_err = 0.0;  // of (s_numeric - leading) against the second-order term
    bool monotone_approach = false;
    int nodes_checked = 0;
    double tol = 0.0;
    bool pass = false;
};

// Compares a converged solve at r = rho against the expansion on the
// wealth window [window.first, window.second]. Throws WindowTooSmall when
// the window starts below 5 y_2 / rho, has no room, or holds fewer than
// eight nodes.
FarFieldReport validate_far_field(const HjbSolution& sol, const ModelParams& p, const Grid& grid,
                                  std::pair<double, double> window, double tol = 0.10);

struct NonexistenceReport {
    double max_rel_err = 0.0;    // ratio against rho gamma (1+psi) / (rho x + y_1)
    double fitted_power = 0.0;   // log-log slope in x, expect -1
    int nodes_checked = 0;
    double tol = 0.0;
    bool pass = false;
};

// The Theta(1/x) decay of (lam_2 s_1 + lam_1 s_2)/(-s_1 s_2) at r = rho,
// which is what rules out an integrable stationary density there. Window
// rules as in validate_far_field.
NonexistenceReport nonexistence_ratio(const HjbSolution& sol, const ModelParams& p,
                                      const Grid& grid, std::pair<double, double> window,
                                      double tol = 0.15);

struct BoundaryLayer {
    double kappa = 0.0;       // (zeta-r)Dv_1 + lam_1(Dv_1-Dv_2) - H_v Dv_1 at x_low
    double sqrt_coeff = 0.0;  // predicted coefficient of sqrt(x - x_low) in -(s_1 - r(x-x_low))
};

struct BoundaryLayerReport {
    BoundaryLayer layer;
    double fitted_exponent = 0.0;   // expect 0.5
    double fitted_coeff = 0.0;      // expect layer.sqrt_coeff
    double control_exponent = 0.0;  // same fit on the s_2 deviation, expect ~1
    int fit_nodes = 0;
    bool pass = false;  // exponent within 0.05 of 0.5 and coefficient within 20%
};

// Square-root boundary layer of s_1 at the borrowing limit, rho > r. Fits
// log(-(s_1 - r(x-x_low))) against log(x-x_low) on the first fit_nodes
// interior nodes (node 0 excluded, s_1 vanishes there exactly). Throws
// FitFailure when a fitted quantity is nonpositive at a fit node.
BoundaryLayerReport boundary_layer(const HjbSolution& sol, const ModelParams& p, double r,
                                   const Grid& grid, int fit_nodes = 10);

// Independent estimate of kappa: the differentiated HJB gives
// s_1 D^2 v_1 -> kappa at x_low, so extrapolate the product to the
// boundary from the first fit_nodes interior nodes.
double kappa_from_curvature(const HjbSolution& sol, const Grid& grid, int fit_nodes = 20);

}  // namespace ezmfg
