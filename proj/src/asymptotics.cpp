#include "ezmfg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ezmfg/errors.hpp"

namespace ezmfg {

namespace {

// least squares of ys against xs; returns (slope, intercept)
std::pair<double, double> fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw FitFailure("degenerate abscissae in least-squares fit");
    const double slope = (n * sxy - sx * sy) / denom;
    return {slope, (sy - slope * sx) / n};
}

// node-index range [lo, hi) covering the wealth window, gated on the
// far-field preconditions
std::pair<std::size_t, std::size_t> window_nodes(const ModelParams& p, const Grid& grid,
                                                 std::pair<double, double> window) {
    if (window.second <= window.first) {
        throw WindowTooSmall("empty wealth window");
    }
    if (window.first < 5.0 * p.y[1] / p.rho) {
        throw WindowTooSmall("window starts inside the transient region");
    }
    const auto& x = grid.x;
    auto lo = std::lower_bound(x.begin(), x.end(), window.first);
    auto hi = std::upper_bound(x.begin(), x.end(), window.second);
    if (hi - lo < 8) {
        throw WindowTooSmall("fewer than eight grid nodes in the window");
    }
    return {static_cast<std::size_t>(lo - x.begin()), static_cast<std::size_t>(hi - x.begin())};
}

}  // namespace

double FarFieldExpansion::zhat(double x, int j) const {
    const double L = params.rho + params.lam[0] + params.lam[1];
    const double w = params.rho * x + params.y[j];
    return params.lam[j] * std::pow(w, -params.gamma) * (params.y[1 - j] - params.y[j]) / L;
}

double FarFieldExpansion::qhat(double x, int j) const {
    const double w = params.rho * x + params.y[j];
    return -Qhat[j] * std::pow(w, -1.0 - params.gamma);
}

FarFieldExpansion far_field_expansion(const ModelParams& p) {
    validate(p, Mode::permissive);
    const double L = p.rho + p.lam[0] + p.lam[1];
    const double dy2 = (p.y[1] - p.y[0]) * (p.y[1] - p.y[0]);
    FarFieldExpansion e;
    e.params = p;
    for (int j = 0; j < 2; ++j) {
        const double lj = p.lam[j];
        const double lb = p.lam[1 - j];
        e.leading[j] = lj * (p.y[j] - p.y[1 - j]) / L;
        const double bracket = 1.0 - (lj * lb + lb * lb + p.rho * lj) / (L * L);
        e.Qhat[j] = p.gamma * lj * dy2 / (2.0 * L) * bracket;
        e.second_order_coeff[j] = p.gamma * (1.0 + p.psi) * lj * dy2 / (2.0 * L) * (bracket - lj / L);
    }
    return e;
}

double far_field_saving(double x, int j, const ModelParams& p) {
    const FarFieldExpansion e = far_field_expansion(p);
    return e.leading[j] + e.second_order_coeff[j] / (p.rho * x + p.y[j]);
}

FarFieldReport validate_far_field(const HjbSolution& sol, const ModelParams& p, const Grid& grid,
                                  std::pair<double, double> window, double tol) {
    const auto [lo, hi] = window_nodes(p, grid, window);
    const FarFieldExpansion e = far_field_expansion(p);

    FarFieldReport rep;
    rep.tol = tol;
    rep.nodes_checked = static_cast<int>(hi - lo);
    for (int j = 0; j < 2; ++j) {
        for (std::size_t k = lo; k < hi; ++k) {
            const double pred = e.second_order_coeff[j] / (p.rho * grid.x[k] + p.y[j]);
            const double dev = sol.s[j][k] - e.leading[j];
            rep.max_rel_err = std::max(rep.max_rel_err, std::fabs(dev - pred) / std::fabs(pred));
        }
    }

    // qualitative approach check on a coarse sample: |s_j - s_j_inf|
    // strictly shrinking across the window for both states
    rep.monotone_approach = true;
    const std::size_t samples = std::min<std::size_t>(hi - lo, 32);
    for (int j = 0; j < 2; ++j) {
        double prev = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            const std::size_t k = lo + i * (hi - lo - 1) / (samples - 1);
            const double mag = std::fabs(sol.s[j][k] - e.leading[j]);
            if (i > 0 && mag >= prev) rep.monotone_approach = false;
            prev = mag;
        }
    }
    rep.pass = rep.max_rel_err < tol && rep.monotone_approach;
    return rep;
}

NonexistenceReport nonexistence_ratio(const HjbSolution& sol, const ModelParams& p,
                                      const Grid& grid, std::pair<double, double> window,
                                      double tol) {
    const auto [lo, hi] = window_nodes(p, grid, window);

    NonexistenceReport rep;
    rep.tol = tol;
    rep.nodes_checked = static_cast<int>(hi - lo);
    std::vector<double> lx, lr;
    lx.reserve(hi - lo);
    lr.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
        const double s1 = sol.s[0][k];
        const double s2 = sol.s[1][k];
        if (!(s1 < 0.0 && s2 > 0.0)) {
            throw DomainError("saving signs in the window do not match the r = rho regime");
        }
        const double ratio = (p.lam[1] * s1 + p.lam[0] * s2) / (-s1 * s2);
        const double target = p.rho * p.gamma * (1.0 + p.psi) / (p.rho * grid.x[k] + p.y[0]);
        rep.max_rel_err = std::max(rep.max_rel_err, std::fabs(ratio - target) / target);
        if (ratio > 0.0) {
            lx.push_back(std::log(grid.x[k]));
            lr.push_back(std::log(ratio));
        }
    }
    if (lx.size() < 8) throw FitFailure("too few positive ratio samples for the power fit");
    rep.fitted_power = fit_line(lx, lr).first;
    rep.pass = rep.max_rel_err < tol && std::fabs(rep.fitted_power + 1.0) < 0.1;
    return rep;
}

BoundaryLayerReport boundary_layer(const HjbSolution& sol, const ModelParams& p, double r,
                                   const Grid& grid, int fit_nodes) {
    const DerivedConstants d = validate(p, Mode::permissive);
    if (!(p.rho > r)) {
        throw DomainError("the boundary layer analysis requires rho > r");
    }
    if (fit_nodes < 2 || fit_nodes + 1 >= grid.n_nodes()) {
        throw FitFailure("fit window does not fit inside the grid");
    }

    const double dv1 = sol.dv[0][0];
    const double dv2 = sol.dv[1][0];
    const double v1 = sol.v[0][0];
    BoundaryLayerReport rep;
    rep.fit_nodes = fit_nodes;
    rep.layer.kappa = (d.zeta - r) * dv1 + p.lam[0] * (dv1 - dv2) - hamiltonian_v(v1, dv1, p) * dv1;

    // coefficient of sqrt(x - x_low): expanding c_1 around the boundary
    // dual slope gives c_1 = a (1 + a^{1/psi} W^E q_1 / rho)^{-psi}, so the
    // front factor carries a 1/rho
    const double a = r * p.x_low + p.y[0];
    const double W = (1.0 - p.gamma) * v1;
    const double E = (p.gamma - 1.0 / p.psi) / (1.0 - p.gamma);
    rep.layer.sqrt_coeff = std::sqrt(2.0 * rep.layer.kappa * p.psi / p.rho *
                                     std::pow(a, 1.0 + 1.0 / p.psi) * std::pow(W, E));

    std::vector<double> lu, l1, l2;
    for (int k = 1; k <= fit_nodes; ++k) {
        const double u = grid.x[k] - grid.x[0];
        const double d1 = -(sol.s[0][k] - r * u);
        const double d2 = std::fabs(sol.s[1][k] - r * u - sol.s[1][0]);
        if (!(d1 > 0.0) || !(d2 > 0.0)) {
            throw FitFailure("saving deviation vanishes inside the fit window");
        }
        lu.push_back(std::log(u));
        l1.push_back(std::log(d1));
        l2.push_back(std::log(d2));
    }
    const auto [e1, c1] = fit_line(lu, l1);
    rep.fitted_exponent = e1;
    rep.fitted_coeff = std::exp(c1);
    rep.control_exponent = fit_line(lu, l2).first;
    rep.pass = std::fabs(rep.fitted_exponent - 0.5) < 0.05 &&
               std::fabs(rep.fitted_coeff - rep.layer.sqrt_coeff) < 0.2 * rep.layer.sqrt_coeff;
    return rep;
}

double kappa_from_curvature(const HjbSolution& sol, const Grid& grid, int fit_nodes) {
    if (fit_nodes < 2 || fit_nodes + 1 >= grid.n_nodes()) {
        throw FitFailure("fit window does not fit inside the grid");
    }
    // s_1 D^2 v_1 = kappa + O(sqrt(x - x_low)); extrapolate the intercept
    std::vector<double> su, pr;
    for (int k = 1; k <= fit_nodes; ++k) {
        const double dl = grid.x[k] - grid.x[k - 1];
        const double dr = grid.x[k + 1] - grid.x[k];
        const double d2v = 2.0 * (sol.v[0][k - 1] * dr - sol.v[0][k] * (dl + dr) +
                                  sol.v[0][k + 1] * dl) /
                           (dl * dr * (dl + dr));
        su.push_back(std::sqrt(grid.x[k] - grid.x[0]));
        pr.push_back(sol.s[0][k] * d2v);
    }
    return fit_line(su, pr).second;
}

}  // namespace ezmfg
