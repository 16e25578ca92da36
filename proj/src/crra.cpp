// additive-utility solver, written separately from the recursive-utility path
// so the two can cross-check each other at gamma = 1/psi

#include <cmath>
#include <vector>

#include "ezmfg/banded.hpp"
#include "ezmfg/hjb.hpp"

namespace ezmfg {

namespace {

double crra_u(double c, double rho, double gamma) {
    return rho * std::pow(c, 1.0 - gamma) / (1.0 - gamma);
}

}  // namespace

HjbSolution solve_hjb_crra(const ModelParams& p, double r, const Grid& grid,
                           const SolveOpts& opts) {
    validate(p, Mode::permissive);
    if (std::abs(p.gamma * p.psi - 1.0) > 1e-12) {
        throw DomainError("additive-utility solver requires gamma = 1/psi");
    }
    if (!(r > 0.0) || !(r <= p.rho)) {
        throw DomainError("solve_hjb_crra requires 0 < r <= rho, got r = " + std::to_string(r));
    }
    const double gamma = p.gamma;
    const double rho = p.rho;
    const int n = grid.n_nodes();

    HjbSolution sol;
    sol.r = r;
    sol.gamma_psi_warning = true;
    for (int j = 0; j < 2; ++j) {
        sol.v[j].resize(n);
        sol.dv[j].resize(n);
        sol.c[j].resize(n);
        sol.s[j].resize(n);
        sol.branch[j].resize(n);
    }

    const int m = 2 * n;
    double dt = opts.time_step;
    std::vector<double> rhs(m);
    double residual = 0.0;
    int it = 0;
    bool done = false;
    for (int attempt = 0; attempt < 4 && !done; ++attempt, dt *= 0.1) {
        const double inv_dt = 1.0 / dt;
        // start both states from the low-income autarky value, a common
        // subsolution; a state-dependent start tends to overshoot into the
        // sawtooth trap on the clustered cells
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < n; ++i) {
                const double c0 = r * grid.x[i] + p.y[0];
                sol.v[j][i] = std::pow(c0, 1.0 - gamma) / (1.0 - gamma);
            }
        }
        bool converged = false;
        for (it = 0; it < opts.max_iter; ++it) {
            // policy update from the current value, plus the stationarity residual
            residual = 0.0;
            for (int j = 0; j < 2; ++j) {
                for (int i = 0; i < n; ++i) {
                    const double inc = r * grid.x[i] + p.y[j];
                    double c = inc, s = 0.0, pu = rho * std::pow(inc, -gamma);
                    UpwindBranch br = UpwindBranch::zero;
                    if (i + 1 < n) {
                        const double pf = (sol.v[j][i + 1] - sol.v[j][i]) / grid.dx[i];
                        if (pf > 0.0) {
                            const double cf = std::pow(pf / rho, -1.0 / gamma);
                            if (inc - cf > 0.0) {
                                br = UpwindBranch::forward;
                                c = cf;
                                s = inc - cf;
                                pu = pf;
                            }
                        }
                    }
                    if (br == UpwindBranch::zero && i > 0) {
                        const double pb = (sol.v[j][i] - sol.v[j][i - 1]) / grid.dx[i - 1];
                        if (pb > 0.0) {
                            const double cb = std::pow(pb / rho, -1.0 / gamma);
                            if (inc - cb < 0.0) {
                                br = UpwindBranch::backward;
                                c = cb;
                                s = inc - cb;
                                pu = pb;
                            }
                        }
                    }
                    sol.c[j][i] = c;
                    sol.s[j][i] = s;
                    sol.dv[j][i] = pu;
                    sol.branch[j][i] = br;
                    const double res = std::abs(rho * sol.v[j][i] - crra_u(c, rho, gamma) -
                                                s * pu - p.lam[j] * (sol.v[1 - j][i] - sol.v[j][i]));
                    residual = std::max(residual, res);
                }
            }
            if (residual < opts.tol) {
                converged = true;
                break;
            }

            BandedMatrix A(m, 2);
            for (int j = 0; j < 2; ++j) {
                for (int i = 0; i < n; ++i) {
                    const int row = 2 * i + j;
                    double diag = inv_dt + rho + p.lam[j];
                    A.at(row, 2 * i + (1 - j)) = -p.lam[j];
                    if (sol.branch[j][i] == UpwindBranch::forward) {
                        const double a = sol.s[j][i] / grid.dx[i];
                        diag += a;
                        A.at(row, row + 2) = -a;
                    } else if (sol.branch[j][i] == UpwindBranch::backward) {
                        const double a = -sol.s[j][i] / grid.dx[i - 1];
                        diag += a;
                        A.at(row, row - 2) = -a;
                    }
                    A.at(row, row) = diag;
                    rhs[row] = crra_u(sol.c[j][i], rho, gamma) + inv_dt * sol.v[j][i];
                }
            }
            A.factor();
            A.solve(rhs);
            for (int j = 0; j < 2; ++j) {
                for (int i = 0; i < n; ++i) {
                    sol.v[j][i] = rhs[2 * i + j];
                }
            }
        }
        if (!converged) {
            continue;
        }
        done = true;
        for (int j = 0; j < 2 && done; ++j) {
            for (int i = 0; i + 1 < n; ++i) {
                if (!(sol.v[j][i + 1] > sol.v[j][i])) {
                    done = false;
                    break;
                }
            }
        }
    }
    if (!done) {
        throw NoConvergence(it, residual);
    }

    for (int j = 0; j < 2; ++j) {
        sol.dv_centered[j].resize(n);
        sol.dv_centered[j][0] = (sol.v[j][1] - sol.v[j][0]) / grid.dx[0];
        sol.dv_centered[j][n - 1] = (sol.v[j][n - 1] - sol.v[j][n - 2]) / grid.dx[n - 2];
        for (int i = 1; i + 1 < n; ++i) {
            sol.dv_centered[j][i] =
                (sol.v[j][i + 1] - sol.v[j][i - 1]) / (grid.x[i + 1] - grid.x[i - 1]);
        }
    }
    sol.residual = residual;
    sol.iterations = it;
    sol.right_boundary_ok = sol.s[1][n - 1] < 0.0;
    return sol;
}

}  // namespace ezmfg
