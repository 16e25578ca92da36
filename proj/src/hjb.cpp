#include "ezmfg/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ezmfg/banded.hpp"

namespace ezmfg {

namespace {

struct EzConstants {
    double theta;
    double zeta;
    double e_c;       // (1 - gamma*psi)/(1 - gamma), exponent on (1-gamma)v in c and H
    double e_f;       // 1 - theta, exponent on (1-gamma)v in F and the dual slope
    double rho_psi;   // rho^psi
    double h_coef;    // rho^psi / (psi - 1)
    double f_coef;    // rho / (1 - 1/psi)
    double inv_psi;   // 1/psi
    double one_m_psi; // 1 - psi
    double ies;       // 1 - 1/psi
};

EzConstants make_constants(const ModelParams& p, const DerivedConstants& dc) {
    EzConstants k;
    k.theta = dc.theta;
    k.zeta = dc.zeta;
    k.e_c = (1.0 - p.gamma * p.psi) / (1.0 - p.gamma);
    k.e_f = 1.0 - dc.theta;
    k.rho_psi = std::pow(p.rho, p.psi);
    k.h_coef = k.rho_psi / (p.psi - 1.0);
    k.f_coef = p.rho / (1.0 - 1.0 / p.psi);
    k.inv_psi = 1.0 / p.psi;
    k.one_m_psi = 1.0 - p.psi;
    k.ies = 1.0 - 1.0 / p.psi;
    return k;
}

struct PolicyState {
    std::array<std::vector<double>, 2> c;
    std::array<std::vector<double>, 2> s;
    std::array<std::vector<double>, 2> p_used;
    std::array<std::vector<double>, 2> f_frozen;  // F(c, v) with the power factor at the current v
    std::array<std::vector<UpwindBranch>, 2> branch;
    double residual = 0.0;
};

// one policy-improvement sweep plus the true nonlinear residual at v
void policy_sweep(const ModelParams& p, double r, const Grid& g, const EzConstants& k,
                  const std::array<std::vector<double>, 2>& v, [[maybe_unused]] bool parallel,
                  PolicyState& ps) {
    const int n = g.n_nodes();
    std::array<double, 2> res_max{0.0, 0.0};
    for (int j = 0; j < 2; ++j) {
        const double yj = p.y[j];
        const double lamj = p.lam[j];
        const std::vector<double>& vj = v[j];
        const std::vector<double>& vo = v[1 - j];
        std::vector<double>& cj = ps.c[j];
        std::vector<double>& sj = ps.s[j];
        std::vector<double>& pj = ps.p_used[j];
        std::vector<double>& fj = ps.f_frozen[j];
        std::vector<UpwindBranch>& bj = ps.branch[j];
        double res_j = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : res_j) if (parallel)
#endif
        for (int i = 0; i < n; ++i) {
            const double inc = r * g.x[i] + yj;
            const double w = (1.0 - p.gamma) * vj[i];
            const double wc = std::pow(w, k.e_c);
            const double wf = std::pow(w, k.e_f);

            double c = 0.0, s = 0.0, pu = 0.0;
            UpwindBranch br = UpwindBranch::zero;
            // forward candidate: keep only if it saves
            if (i + 1 < n) {
                const double pf = (vj[i + 1] - vj[i]) / g.dx[i];
                if (pf > 0.0) {
                    const double cf = k.rho_psi * std::pow(pf, -p.psi) * wc;
                    if (inc - cf > 0.0) {
                        br = UpwindBranch::forward;
                        c = cf;
                        s = inc - cf;
                        pu = pf;
                    }
                }
            }
            // backward candidate: keep only if it dissaves
            if (br == UpwindBranch::zero && i > 0) {
                const double pb = (vj[i] - vj[i - 1]) / g.dx[i - 1];
                if (pb > 0.0) {
                    const double cb = k.rho_psi * std::pow(pb, -p.psi) * wc;
                    if (inc - cb < 0.0) {
                        br = UpwindBranch::backward;
                        c = cb;
                        s = inc - cb;
                        pu = pb;
                    }
                }
            }
            if (br == UpwindBranch::zero) {
                // state-constraint clamp: consume the income flow, zero drift;
                // the reported derivative is the slope at which this c is optimal
                c = inc;
                s = 0.0;
                pu = p.rho * std::pow(c, -k.inv_psi) * wf;
            }
            cj[i] = c;
            sj[i] = s;
            pj[i] = pu;
            bj[i] = br;
            fj[i] = k.f_coef * std::pow(c, k.ies) * wf;

            // true residual: zeta*v - H(x, y, v, p_used) - lam*(v_other - v)
            const double ham = inc * pu + k.h_coef * std::pow(pu, k.one_m_psi) * wc;
            const double res = std::abs(k.zeta * vj[i] - ham - lamj * (vo[i] - vj[i]));
            res_j = std::max(res_j, res);
        }
        res_max[j] = res_j;
    }
    ps.residual = std::max(res_max[0], res_max[1]);
}

// interleaved unknown ordering: row 2*i + j couples to 2*(i +- 1) + j by
// transport and to 2*i + (1 - j) by switching, bandwidth 2; the 1/dt terms
// implement the false transient
void assemble_and_solve(const ModelParams& p, const Grid& g, const EzConstants& k,
                        const PolicyState& ps, const std::array<std::vector<double>, 2>& vold,
                        double dt, std::vector<double>& vout) {
    const int n = g.n_nodes();
    const int m = 2 * n;
    const double inv_dt = 1.0 / dt;
    BandedMatrix A(m, 2);
    vout.assign(m, 0.0);
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < n; ++i) {
            const int row = 2 * i + j;
            double diag = inv_dt + k.zeta + p.lam[j];
            A.at(row, 2 * i + (1 - j)) = -p.lam[j];
            switch (ps.branch[j][i]) {
                case UpwindBranch::forward: {
                    const double a = ps.s[j][i] / g.dx[i];
                    diag += a;
                    A.at(row, row + 2) = -a;
                    break;
                }
                case UpwindBranch::backward: {
                    const double a = -ps.s[j][i] / g.dx[i - 1];
                    diag += a;
                    A.at(row, row - 2) = -a;
                    break;
                }
                case UpwindBranch::zero:
                    break;
            }
            A.at(row, row) = diag;
            vout[row] = ps.f_frozen[j][i] + inv_dt * vold[j][i];
        }
    }
    // monotone-scheme assertion: positive diagonal, nonpositive off-diagonals,
    // and row dominance with margin zeta
    for (int row = 0; row < m; ++row) {
        double diag = A.at(row, row);
        double off = 0.0;
        for (int d = -2; d <= 2; ++d) {
            int col = row + d;
            if (d == 0 || col < 0 || col >= m) continue;
            double val = A.at(row, col);
            if (val > 0.0) {
                throw Error("discrete operator lost monotonicity at row " + std::to_string(row));
            }
            off += -val;
        }
        if (!(diag > 0.0) || diag - off < k.zeta * (1.0 - 1e-10)) {
            throw Error("discrete operator lost diagonal dominance at row " + std::to_string(row));
        }
    }
    A.factor();
    A.solve(vout);
}

void centered_derivative(const Grid& g, const std::vector<double>& v, std::vector<double>& out) {
    const int n = g.n_nodes();
    out.resize(n);
    out[0] = (v[1] - v[0]) / g.dx[0];
    out[n - 1] = (v[n - 1] - v[n - 2]) / g.dx[n - 2];
    for (int i = 1; i + 1 < n; ++i) {
        out[i] = (v[i + 1] - v[i - 1]) / (g.x[i + 1] - g.x[i - 1]);
    }
}

}  // namespace

HjbSolution solve_hjb(const ModelParams& p, double r, const Grid& grid, const SolveOpts& opts,
                      Mode mode) {
    DerivedConstants dc = validate(p, mode);
    if (!(r > 0.0) || !(r <= p.rho)) {
        throw DomainError("solve_hjb requires 0 < r <= rho, got r = " + std::to_string(r));
    }
    const EzConstants k = make_constants(p, dc);
    const int n = grid.n_nodes();

    HjbSolution sol;
    sol.r = r;
    sol.gamma_psi_warning = dc.gamma_psi_warning;

    PolicyState ps;
    for (int j = 0; j < 2; ++j) {
        ps.c[j].resize(n);
        ps.s[j].resize(n);
        ps.p_used[j].resize(n);
        ps.f_frozen[j].resize(n);
        ps.branch[j].resize(n);
    }

    // the value enters the coefficients through powers of (1-gamma)v with
    // exponents that grow as theta does, and the fixed-point map stops
    // contracting when the time step exceeds roughly 2/((theta-2) zeta)
    double dt = opts.time_step;
    if (dc.theta > 2.0) {
        dt = std::min(dt, 0.5 / ((dc.theta - 2.0) * k.zeta));
    }
    std::vector<double> vnew;
    int last_it = 0;
    double last_res = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt, dt *= 0.1) {
        for (int j = 0; j < 2; ++j) {
            sol.v[j].resize(n);
            for (int i = 0; i < n; ++i) {
                sol.v[j][i] = subsolution_value(grid.x[i], 0, r, p);
            }
        }
        int it = 0;
        bool converged = false;
        double res0 = 0.0;
        for (; it < opts.max_iter; ++it) {
            policy_sweep(p, r, grid, k, sol.v, opts.parallel, ps);
            if (ps.residual < opts.tol) {
                converged = true;
                break;
            }
            if (it == 0) res0 = ps.residual;
            if (!std::isfinite(ps.residual) || ps.residual > 1e8 * (res0 + 1.0)) {
                break;  // diverging, retry with a smaller time step
            }
            assemble_and_solve(p, grid, k, ps, sol.v, dt, vnew);
            for (int j = 0; j < 2; ++j) {
                for (int i = 0; i < n; ++i) {
                    sol.v[j][i] = vnew[2 * i + j];
                }
            }
        }
        last_it = it;
        last_res = ps.residual;
        if (!converged) {
            continue;
        }
        bool increasing = true;
        for (int j = 0; j < 2 && increasing; ++j) {
            for (int i = 0; i + 1 < n; ++i) {
                if (!(sol.v[j][i + 1] > sol.v[j][i])) {
                    increasing = false;
                    break;
                }
            }
        }
        if (increasing) {
            sol.c = std::move(ps.c);
            sol.s = std::move(ps.s);
            sol.dv = std::move(ps.p_used);
            sol.branch = std::move(ps.branch);
            sol.residual = ps.residual;
            sol.iterations = it;
            for (int j = 0; j < 2; ++j) {
                centered_derivative(grid, sol.v[j], sol.dv_centered[j]);
            }
            sol.right_boundary_ok = sol.s[1][n - 1] < 0.0;
            return sol;
        }
    }
    throw NoConvergence(last_it, last_res);
}

BoundaryRegime boundary_saving_classifier(const ModelParams& p, double r) {
    DerivedConstants dc = validate(p, Mode::permissive);
    if (!(r >= 0.0) || !(r <= p.rho)) {
        throw DomainError("classifier requires 0 <= r <= rho, got r = " + std::to_string(r));
    }
    const double a2 = std::pow(r * p.x_low + p.y[1], -1.0 / p.psi);
    const double a1 = std::pow(r * p.x_low + p.y[0], -1.0 / p.psi);
    const double bracket = p.lam[1] * (a2 - a1);  // negative: y2 > y1
    if (r > 0.0 && (dc.zeta - r) * a2 + bracket >= 0.0) {
        return BoundaryRegime::s2_negative_everywhere;
    }
    if ((p.rho - r) * a2 + bracket < 0.0) {
        return BoundaryRegime::s2_positive_at_boundary;
    }
    return BoundaryRegime::indeterminate;
}

std::string QualitativeReport::describe() const {
    auto line = [](const char* name, bool ok) {
        return std::string(name) + ": " + (ok ? "pass" : "FAIL") + "\n";
    };
    std::string out;
    out += line("v increasing", increasing);
    out += line("v concave", concave);
    out += line("envelope sandwich", envelope_ok);
    out += line("v2 > v1", v2_above_v1);
    out += line("s1(x_low) = 0", s1_zero_at_boundary);
    out += line("s1 < 0 interior", s1_negative_interior);
    out += line("consumption positive", consumption_positive);
    out += line("Dv1 > Dv2 at boundary", dv1_above_dv2_at_boundary);
    out += line("s2 sign change", s2_sign_change);
    return out;
}

QualitativeReport assert_qualitative(const HjbSolution& sol, const ModelParams& p, double r,
                                     const Grid& grid) {
    QualitativeReport rep;
    const int n = grid.n_nodes();

    rep.increasing = true;
    rep.concave = true;
    rep.envelope_ok = true;
    rep.v2_above_v1 = true;
    rep.consumption_positive = true;
    for (int j = 0; j < 2; ++j) {
        double prev_slope = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (i + 1 < n) {
                double slope = (sol.v[j][i + 1] - sol.v[j][i]) / grid.dx[i];
                if (!(slope > 0.0)) rep.increasing = false;
                if (slope > prev_slope + 1e-8 * (1.0 + std::abs(prev_slope))) rep.concave = false;
                prev_slope = slope;
            }
            auto [lo, hi] = envelope(grid.x[i], r, p);
            if (!(sol.v[j][i] >= lo) || !(sol.v[j][i] <= hi)) rep.envelope_ok = false;
            if (!(sol.c[j][i] > 0.0)) rep.consumption_positive = false;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!(sol.v[1][i] > sol.v[0][i])) rep.v2_above_v1 = false;
    }
    rep.s1_zero_at_boundary = sol.s[0][0] == 0.0;
    rep.s1_negative_interior = true;
    for (int i = 1; i < n; ++i) {
        if (!(sol.s[0][i] < 0.0)) rep.s1_negative_interior = false;
    }
    if (sol.s[1][0] > 0.0) {
        rep.dv1_above_dv2_at_boundary = sol.dv[0][0] > sol.dv[1][0];
        if (p.rho > r) {
            // last nonnegative s2 must be interior, negative afterwards
            int last_nonneg = -1;
            for (int i = 0; i < n; ++i) {
                if (sol.s[1][i] >= 0.0) last_nonneg = i;
            }
            rep.s2_sign_change = last_nonneg >= 0 && last_nonneg < n - 1;
        }
    }
    return rep;
}

std::vector<double> boundary_divergence(const ModelParams& p, double r, double x_max,
                                        const std::vector<int>& cell_counts, const SolveOpts& opts,
                                        Mode mode) {
    std::vector<double> d2;
    d2.reserve(cell_counts.size());
    for (int n : cell_counts) {
        Grid g = build_grid(p.x_low, x_max, n, Clustering::sqrt_boundary);
        HjbSolution sol = solve_hjb(p, r, g, opts, mode);
        const double dx0 = g.dx[0];
        const double dx1 = g.dx[1];
        const double num =
            2.0 * (dx0 * sol.v[0][2] - (dx0 + dx1) * sol.v[0][1] + dx1 * sol.v[0][0]);
        d2.push_back(num / (dx0 * dx1 * (dx0 + dx1)));
    }
    return d2;
}

std::vector<StabilityDeviation> stability_in_r(const ModelParams& p,
                                               const std::vector<double>& r_seq, const Grid& grid,
                                               const SolveOpts& opts, Mode mode) {
    std::vector<StabilityDeviation> out;
    if (r_seq.size() < 2) return out;
    HjbSolution prev = solve_hjb(p, r_seq[0], grid, opts, mode);
    for (size_t k = 1; k < r_seq.size(); ++k) {
        HjbSolution cur = solve_hjb(p, r_seq[k], grid, opts, mode);
        StabilityDeviation dev{0.0, 0.0};
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < grid.n_nodes(); ++i) {
                dev.dv = std::max(dev.dv, std::abs(cur.v[j][i] - prev.v[j][i]));
                dev.ds = std::max(dev.ds, std::abs(cur.s[j][i] - prev.s[j][i]));
            }
        }
        out.push_back(dev);
        prev = std::move(cur);
    }
    return out;
}

}  // namespace ezmfg
