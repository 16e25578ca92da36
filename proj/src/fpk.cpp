#include "ezmfg/fpk.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <vector>

namespace ezmfg {

namespace {

// trapezoid weights turning node densities into node masses
std::vector<double> trapezoid_weights(const Grid& g) {
    const int n = g.n_nodes();
    std::vector<double> w(n);
    w[0] = 0.5 * g.dx[0];
    w[n - 1] = 0.5 * g.dx[n - 2];
    for (int i = 1; i + 1 < n; ++i) {
        w[i] = 0.5 * (g.dx[i - 1] + g.dx[i]);
    }
    return w;
}

StationaryMeasure dirac_measure(const ModelParams& p, const Grid& grid) {
    const int n = grid.n_nodes();
    const double big_lam = p.lam[0] + p.lam[1];
    StationaryMeasure m;
    m.degenerate = true;
    m.support_end = grid.x_low();
    m.mu = {p.lam[1] / big_lam, p.lam[0] / big_lam};
    m.mass = m.mu;
    for (int j = 0; j < 2; ++j) {
        m.g[j].assign(n, 0.0);
        m.cdf[j].assign(n, m.mu[j]);
    }
    return m;
}

struct GeneratorEntry {
    int row;
    int col;
    double val;
};

// Entries of the transport-plus-switching generator L acting on values,
// row = 2*i + j, taken from the converged upwind branches. Row sums are
// zero by construction.
std::vector<GeneratorEntry> generator_entries(const HjbSolution& sol, const ModelParams& p,
                                              const Grid& grid) {
    const int n = grid.n_nodes();
    std::vector<GeneratorEntry> out;
    out.reserve(6 * n);
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < n; ++i) {
            const int row = 2 * i + j;
            double af = 0.0;
            double ab = 0.0;
            if (sol.branch[j][i] == UpwindBranch::forward) {
                af = sol.s[j][i] / grid.dx[i];
            } else if (sol.branch[j][i] == UpwindBranch::backward) {
                ab = -sol.s[j][i] / grid.dx[i - 1];
            }
            const double lam = p.lam[j];
            out.push_back({row, row, -(af + ab + lam)});
            if (af > 0.0) out.push_back({row, 2 * (i + 1) + j, af});
            if (ab > 0.0) out.push_back({row, 2 * (i - 1) + j, ab});
            out.push_back({row, 2 * i + (1 - j), lam});
        }
    }
    return out;
}

}  // namespace

double find_xhat(const std::vector<double>& s2, const Grid& grid) {
    if (!(s2[0] > 0.0)) {
        throw DomainError("find_xhat requires positive saving of the high-income state at x_low");
    }
    for (int i = 0; i + 1 < grid.n_nodes(); ++i) {
        if (s2[i] > 0.0 && s2[i + 1] <= 0.0) {
            return grid.x[i] + grid.dx[i] * s2[i] / (s2[i] - s2[i + 1]);
        }
    }
    throw NoCrossing("saving of the high-income state never crosses zero on the grid");
}

StationaryMeasure closed_form_measure(const HjbSolution& sol, const ModelParams& p,
                                      const Grid& grid) {
    const int n = grid.n_nodes();
    const std::vector<double>& s1 = sol.s[0];
    const std::vector<double>& s2 = sol.s[1];
    const double lam1 = p.lam[0];
    const double lam2 = p.lam[1];

    if (s2[0] <= 0.0) {
        return dirac_measure(p, grid);
    }

    const double xhat = find_xhat(s2, grid);
    int b = 0;
    while (s2[b + 1] > 0.0) ++b;

    for (int k = 1; k <= b; ++k) {
        if (s1[k] >= 0.0) {
            throw DomainError("state-1 saving must stay negative on the interior of the support");
        }
    }

    // Work in u = sqrt(x - x_low). The outflow s1 vanishes like a square
    // root at the boundary, so C(u) = -s1/u has a finite positive limit
    // and every integrand below is smooth in u.
    std::vector<double> u(n);
    for (int k = 0; k < n; ++k) u[k] = std::sqrt(grid.x[k] - grid.x_low());

    std::vector<double> cu(b + 1, 0.0);
    for (int k = 1; k <= b; ++k) cu[k] = -s1[k] / u[k];
    if (b >= 1) {
        // C(0) from a least-squares fit of -s1 = C u through the first
        // interior nodes; a one-node estimate is noisier
        const int kfit = std::min(3, b);
        double num = 0.0, den = 0.0;
        for (int k = 1; k <= kfit; ++k) {
            num += u[k] * (-s1[k]);
            den += u[k] * u[k];
        }
        cu[0] = num / den;
    }

    // Integrating factor E = exp(I), I' = -lam1/s1 - lam2/s2. In u the
    // integrand is 2*lam1/C(u) - 2*u*lam2/s2, finite at u = 0. E is
    // shifted by its running maximum before exponentiating; the flux
    // constant absorbs the shift.
    std::vector<double> slope(b + 1);
    slope[0] = (b >= 1) ? 2.0 * lam1 / cu[0] : 0.0;
    for (int k = 1; k <= b; ++k) slope[k] = 2.0 * lam1 / cu[k] - 2.0 * u[k] * lam2 / s2[k];
    std::vector<double> expo(b + 1, 0.0);
    for (int k = 1; k <= b; ++k) {
        expo[k] = expo[k - 1] + 0.5 * (slope[k - 1] + slope[k]) * (u[k] - u[k - 1]);
    }
    const double shift = *std::max_element(expo.begin(), expo.end());
    std::vector<double> E(b + 1);
    for (int k = 0; k <= b; ++k) E[k] = std::exp(expo[k] - shift);

    // Cell masses with unit flux constant. The bracket cell [x_b, xhat]
    // uses the identity int E/s2 = (E(x_b) - E(xhat))/lam2
    // - (lam1/lam2) int E/s1 with E(xhat) = 0, trapezoiding the remaining
    // integral; the state-1 tail is trapezoided directly.
    std::vector<double> cm1(b + 1, 0.0);
    std::vector<double> cm2(b + 1, 0.0);
    for (int k = 0; k < b; ++k) {
        const double l2 = 2.0 * u[k] * E[k] / s2[k];
        const double r2 = 2.0 * u[k + 1] * E[k + 1] / s2[k + 1];
        cm2[k] = 0.5 * (l2 + r2) * (u[k + 1] - u[k]);
        const double l1 = 2.0 * E[k] / cu[k];
        const double r1 = 2.0 * E[k + 1] / cu[k + 1];
        cm1[k] = 0.5 * (l1 + r1) * (u[k + 1] - u[k]);
    }
    cm2[b] = E[b] / lam2;
    if (b >= 1) {
        cm2[b] -= (lam1 / lam2) * 0.5 * (xhat - grid.x[b]) * E[b] / s1[b];
        cm1[b] = -0.5 * (xhat - grid.x[b]) * E[b] / s1[b];
    }

    double m2_raw = 0.0;
    for (int k = 0; k <= b; ++k) m2_raw += cm2[k];
    if (!(m2_raw > 0.0) || !std::isfinite(m2_raw)) {
        throw NegativeDensity("stationary high-income mass is not positive");
    }

    // Pin the high-income mass to its switching-balance value; the
    // low-income total is left as a genuine consistency residual.
    const double big_lam = lam1 + lam2;
    const double kap = (lam1 / big_lam) / m2_raw;

    StationaryMeasure m;
    m.support_end = xhat;
    m.mu = {kap * E[0] / lam1, 0.0};
    for (int j = 0; j < 2; ++j) {
        m.g[j].assign(n, 0.0);
        m.cdf[j].assign(n, 0.0);
    }
    for (int k = 0; k <= b; ++k) m.g[1][k] = kap * E[k] / s2[k];
    for (int k = 1; k <= b; ++k) m.g[0][k] = -kap * E[k] / s1[k];
    if (b >= 1) {
        // first-cell average so artifacts stay finite; the density itself
        // diverges like 1/sqrt(x - x_low)
        m.g[0][0] = kap * cm1[0] / grid.dx[0];
    }

    m.cdf[0][0] = m.mu[0];
    m.cdf[1][0] = 0.0;
    for (int k = 1; k < n; ++k) {
        const double add1 = (k - 1 <= b) ? kap * cm1[k - 1] : 0.0;
        const double add2 = (k - 1 <= b) ? kap * cm2[k - 1] : 0.0;
        m.cdf[0][k] = m.cdf[0][k - 1] + add1;
        m.cdf[1][k] = m.cdf[1][k - 1] + add2;
    }
    m.mass = {m.cdf[0][n - 1], m.cdf[1][n - 1]};

    for (int j = 0; j < 2; ++j) {
        for (double v : m.g[j]) {
            if (!std::isfinite(v) || v < 0.0) {
                throw NegativeDensity("stationary density has a negative or non-finite node");
            }
        }
    }
    return m;
}

StationaryMeasure adjoint_measure(const HjbSolution& sol, const ModelParams& p,
                                  const Grid& grid) {
    const int n = grid.n_nodes();
    const int nn = 2 * n;
    const std::vector<GeneratorEntry> gen = generator_entries(sol, p, grid);

    double max_diag = 0.0;
    for (const GeneratorEntry& e : gen) {
        if (e.row == e.col) max_diag = std::max(max_diag, -e.val);
    }

    // Stationarity L^T m = 0 with one redundant row (the rows of L sum to
    // zero) replaced by the normalization sum(m) = 1.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(gen.size() + static_cast<std::size_t>(nn));
    for (const GeneratorEntry& e : gen) {
        if (e.col == 0) continue;
        trips.emplace_back(e.col, e.row, e.val);
    }
    for (int k = 0; k < nn; ++k) trips.emplace_back(0, k, 1.0);

    Eigen::SparseMatrix<double> lt(nn, nn);
    lt.setFromTriplets(trips.begin(), trips.end());
    lt.makeCompressed();

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nn);
    rhs[0] = 1.0;

    std::vector<double> mvec(nn, 0.0);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(lt);
    lu.factorize(lt);
    bool have = false;
    if (lu.info() == Eigen::Success) {
        Eigen::VectorXd sol_v = lu.solve(rhs);
        if (lu.info() == Eigen::Success) {
            for (int k = 0; k < nn; ++k) mvec[k] = sol_v[k];
            have = true;
        }
    }

    auto residual = [&](const std::vector<double>& v) {
        std::vector<double> res(nn, 0.0);
        for (const GeneratorEntry& e : gen) res[e.col] += e.val * v[e.row];
        double r = 0.0;
        for (double x : res) r = std::max(r, std::abs(x));
        return r;
    };
    auto max_abs = [&](const std::vector<double>& v) {
        double r = 0.0;
        for (double x : v) r = std::max(r, std::abs(x));
        return r;
    };

    double scale = max_diag * std::max(max_abs(mvec), 1e-300);
    if (!have || residual(mvec) > 1e-8 * scale) {
        // damped power iteration on (I + tau L^T) as a fallback
        const double tau = 0.9 / max_diag;
        std::fill(mvec.begin(), mvec.end(), 1.0 / nn);
        std::vector<double> next(nn);
        for (int it = 0; it < 50000; ++it) {
            std::copy(mvec.begin(), mvec.end(), next.begin());
            for (const GeneratorEntry& e : gen) next[e.col] += tau * e.val * mvec[e.row];
            double tot = 0.0;
            for (double& x : next) {
                x = std::max(x, 0.0);
                tot += x;
            }
            for (double& x : next) x /= tot;
            mvec.swap(next);
            if (it % 256 == 0 && residual(mvec) <= 1e-8 * max_diag * max_abs(mvec)) break;
        }
        scale = max_diag * max_abs(mvec);
        if (residual(mvec) > 1e-6 * scale) {
            throw SingularSolve("stationary adjoint solve did not converge");
        }
    }

    double total = 0.0;
    const double floor = -1e-9 * max_abs(mvec);
    for (double& x : mvec) {
        if (!std::isfinite(x)) throw NegativeDensity("adjoint measure has a non-finite node");
        if (x < floor) throw NegativeDensity("adjoint measure has a substantially negative node");
        x = std::max(x, 0.0);
        total += x;
    }
    for (double& x : mvec) x /= total;

    const std::vector<double> w = trapezoid_weights(grid);
    StationaryMeasure m;
    m.degenerate = (sol.s[1][0] <= 0.0);
    if (m.degenerate) {
        m.support_end = grid.x_low();
    } else {
        try {
            m.support_end = find_xhat(sol.s[1], grid);
        } catch (const NoCrossing&) {
            m.support_end = grid.x_max();
        }
    }
    for (int j = 0; j < 2; ++j) {
        m.g[j].assign(n, 0.0);
        m.cdf[j].assign(n, 0.0);
        m.mu[j] = mvec[j];
        m.cdf[j][0] = mvec[j];
        for (int k = 1; k < n; ++k) {
            m.g[j][k] = mvec[2 * k + j] / w[k];
            m.cdf[j][k] = m.cdf[j][k - 1] + mvec[2 * k + j];
        }
        m.mass[j] = m.cdf[j][n - 1];
    }
    return m;
}

std::array<std::vector<double>, 2> node_masses(const StationaryMeasure& m, const Grid& grid) {
    const int n = grid.n_nodes();
    const std::vector<double> w = trapezoid_weights(grid);
    std::array<std::vector<double>, 2> out;
    for (int j = 0; j < 2; ++j) {
        out[j].assign(n, 0.0);
        out[j][0] = m.mu[j] + w[0] * m.g[j][0];
        for (int k = 1; k < n; ++k) out[j][k] = w[k] * m.g[j][k];
    }
    return out;
}

std::vector<double> interface_flux(const HjbSolution& sol, const Grid& grid,
                                   const std::array<std::vector<double>, 2>& masses) {
    const int n = grid.n_nodes();
    std::vector<double> flux(n - 1, 0.0);
    for (int k = 0; k + 1 < n; ++k) {
        double f = 0.0;
        for (int j = 0; j < 2; ++j) {
            if (sol.branch[j][k] == UpwindBranch::forward) {
                f += sol.s[j][k] * masses[j][k];
            }
            if (sol.branch[j][k + 1] == UpwindBranch::backward) {
                f += sol.s[j][k + 1] * masses[j][k + 1];
            }
        }
        flux[k] = f / grid.dx[k];
    }
    return flux;
}

double aggregate_capital(const StationaryMeasure& m, const Grid& grid) {
    const int n = grid.n_nodes();
    double k_total = (m.mu[0] + m.mu[1]) * grid.x_low();
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k + 1 < n; ++k) {
            const double mid = 0.5 * (grid.x[k] + grid.x[k + 1]);
            k_total += mid * (m.cdf[j][k + 1] - m.cdf[j][k]);
        }
    }
    return k_total;
}

double aggregate_labor(const ModelParams& p) {
    return (p.y[1] * p.lam[0] + p.y[0] * p.lam[1]) / (p.lam[0] + p.lam[1]);
}

}  // namespace ezmfg
