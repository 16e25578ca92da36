#include "ezmfg/equilibrium.hpp"

#include <cmath>
#include <map>

namespace ezmfg {

double capital_demand(double r, const ProductionParams& prod, double labor) {
    validate_production(prod);
    if (r + prod.delta <= 0.0) {
        throw DomainError("capital demand is undefined for r <= -delta");
    }
    return labor * std::pow(prod.A * prod.alpha / (r + prod.delta), 1.0 / (1.0 - prod.alpha));
}

double capital_supply(const ModelParams& p, double r, const Grid& grid, const SolveOpts& opts,
                      Mode mode) {
    if (boundary_saving_classifier(p, r) == BoundaryRegime::s2_negative_everywhere) {
        return p.x_low;
    }
    HjbSolution sol = solve_hjb(p, r, grid, opts, mode);
    StationaryMeasure m = closed_form_measure(sol, p, grid);
    return aggregate_capital(m, grid);
}

bool existence_condition(const ModelParams& p) {
    const DerivedConstants d = validate(p, Mode::permissive);
    return p.rho / (d.theta * p.lam[1]) > std::pow(p.y[1] / p.y[0], 1.0 / p.psi) - 1.0;
}

EquilibriumResult solve_equilibrium(const ModelParams& p, const ProductionParams& prod,
                                    const Grid& grid, Coupling coupling,
                                    const EquilibriumOpts& opts) {
    validate(p, opts.mode);
    if (coupling == Coupling::aiyagari) {
        validate_production(prod);
    } else if (!(p.x_low < prod.B)) {
        throw AssumptionViolation("B", "the Huggett bond supply must exceed the borrowing limit");
    }

    const double labor = aggregate_labor(p);
    const double r_cap = p.rho - 1e-3;
    double r_lo = opts.r_lo;
    double r_hi = (opts.r_hi > 0.0) ? opts.r_hi : r_cap;
    if (!(0.0 < r_lo && r_lo < r_hi && r_hi <= r_cap)) {
        throw DomainError("equilibrium bracket must satisfy 0 < r_lo < r_hi <= rho - 1e-3");
    }

    std::map<double, double> k_cache;
    int evaluations = 0;
    auto supply = [&](double r) {
        auto it = k_cache.find(r);
        if (it != k_cache.end()) return it->second;
        double k = capital_supply(p, r, grid, opts.solve, opts.mode);
        ++evaluations;
        k_cache.emplace(r, k);
        return k;
    };
    auto excess = [&](double r) {
        double target = (coupling == Coupling::aiyagari) ? capital_demand(r, prod, labor) : prod.B;
        return supply(r) - target;
    };

    double phi_lo = excess(r_lo);
    if (phi_lo >= 0.0) {
        throw NoBracket("excess capital supply is already nonnegative at r_lo");
    }
    double phi_hi = excess(r_hi);
    while (phi_hi <= 0.0 && r_hi < r_cap) {
        r_hi = std::min(r_cap, 0.5 * (r_hi + p.rho));
        phi_hi = excess(r_hi);
    }
    if (phi_hi <= 0.0) {
        throw NoBracket("no sign change of excess supply up to rho - 1e-3");
    }

    for (int it = 0; it < opts.max_bisect && (r_hi - r_lo) > opts.tol_r; ++it) {
        const double mid = 0.5 * (r_lo + r_hi);
        const double phi = excess(mid);
        if (phi < 0.0) {
            r_lo = mid;
            phi_lo = phi;
        } else {
            r_hi = mid;
            phi_hi = phi;
        }
    }

    // report from the bracket end with the smaller excess, solved once more
    // so the returned solution and measure are the ones behind K
    const double r_star = (std::fabs(phi_lo) <= std::fabs(phi_hi)) ? r_lo : r_hi;
    EquilibriumResult res;
    res.r_star = r_star;
    res.N = labor;
    res.bracket = {r_lo, r_hi};
    res.solution = solve_hjb(p, r_star, grid, opts.solve, opts.mode);
    res.measure = closed_form_measure(res.solution, p, grid);
    res.K = aggregate_capital(res.measure, grid);
    const double target =
        (coupling == Coupling::aiyagari) ? capital_demand(r_star, prod, labor) : prod.B;
    res.residual = std::fabs(res.K - target);
    res.evaluations = evaluations;
    return res;
}

std::vector<std::pair<double, double>> blowup_diagnostic(const ModelParams& p,
                                                         const std::vector<double>& rs,
                                                         const Grid& grid, const SolveOpts& opts,
                                                         Mode mode) {
    std::vector<std::pair<double, double>> table;
    table.reserve(rs.size());
    for (double r : rs) {
        table.emplace_back(r, capital_supply(p, r, grid, opts, mode));
    }
    return table;
}

}  // namespace ezmfg
