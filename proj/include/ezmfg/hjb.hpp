#pragma once

#include <array>
#include <string>
#include <vector>

#include "ezmfg/grid.hpp"
#include "ezmfg/model.hpp"

namespace ezmfg {

struct SolveOpts {
    double tol = 1e-8;         // sup-norm of the true nonlinear residual
    int max_iter = 5000;       // policy iterations
    double time_step = 100.0;  // false-transient relaxation; pure policy iteration as it grows
    bool parallel = true;      // per-node sweeps use OpenMP when compiled in
};

// finite-difference branch the scheme selected at a node
enum class UpwindBranch : unsigned char { forward, backward, zero };

struct HjbSolution {
    std::array<std::vector<double>, 2> v;            // value function per income state
    std::array<std::vector<double>, 2> dv;           // derivative the scheme used (dual slope at zero-saving nodes)
    std::array<std::vector<double>, 2> dv_centered;  // centered derivative, diagnostics only
    std::array<std::vector<double>, 2> c;            // consumption policy
    std::array<std::vector<double>, 2> s;            // saving policy r*x + y_j - c_j
    std::array<std::vector<UpwindBranch>, 2> branch;
    double r = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool right_boundary_ok = false;  // s_2(x_max) < 0, so no mass leaks rightward
    bool gamma_psi_warning = false;
};

// implicit upwind scheme with false-transient policy iteration on the
// rewritten two-state HJB; the borrowing limit is a state constraint
// (zero-saving clamp when the forward branch would dissave at x_low), and the
// truncation boundary at x_max is treated the same way in the rare case the
// backward branch saves. A full Howard step can overshoot into a sawtooth
// profile that the sign-based upwind rule accepts as a fixed point, so the
// solver restarts with a smaller time step if the converged value is not
// increasing.
HjbSolution solve_hjb(const ModelParams& p, double r, const Grid& grid, const SolveOpts& opts = {},
                      Mode mode = Mode::strict);

// independently coded CRRA solver (additive utility, gamma = 1/psi); serves
// as an oracle for the recursive-utility path at gamma*psi = 1
HjbSolution solve_hjb_crra(const ModelParams& p, double r, const Grid& grid,
                           const SolveOpts& opts = {});

enum class BoundaryRegime { s2_negative_everywhere, s2_positive_at_boundary, indeterminate };

// closed-form sufficient conditions for the sign of s_2 at the borrowing limit
BoundaryRegime boundary_saving_classifier(const ModelParams& p, double r);

struct QualitativeReport {
    bool increasing = false;
    bool concave = false;
    bool envelope_ok = false;
    bool v2_above_v1 = false;
    bool s1_zero_at_boundary = false;
    bool s1_negative_interior = false;
    bool consumption_positive = false;
    // checked only when s_2(x_low) > 0
    bool dv1_above_dv2_at_boundary = true;
    // checked only when rho > r and s_2(x_low) > 0: s_2 changes sign once and
    // stays negative through x_max
    bool s2_sign_change = true;

    bool all() const {
        return increasing && concave && envelope_ok && v2_above_v1 && s1_zero_at_boundary &&
               s1_negative_interior && consumption_positive && dv1_above_dv2_at_boundary &&
               s2_sign_change;
    }
    std::string describe() const;
};

QualitativeReport assert_qualitative(const HjbSolution& sol, const ModelParams& p, double r,
                                     const Grid& grid);

// discrete second derivative of v_1 at the first interior node for a sequence
// of refinements; diverges to -infinity as the sqrt layer is resolved
std::vector<double> boundary_divergence(const ModelParams& p, double r, double x_max,
                                        const std::vector<int>& cell_counts,
                                        const SolveOpts& opts = {}, Mode mode = Mode::strict);

struct StabilityDeviation {
    double dv;  // sup-norm change of the value between consecutive rates
    double ds;  // sup-norm change of the saving policy
};

// solves along r_seq and reports consecutive policy deviations
std::vector<StabilityDeviation> stability_in_r(const ModelParams& p,
                                               const std::vector<double>& r_seq, const Grid& grid,
                                               const SolveOpts& opts = {},
                                               Mode mode = Mode::strict);

}  // namespace ezmfg
