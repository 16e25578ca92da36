#include "ezmfg/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "ezmfg/errors.hpp"
#include "ezmfg/rng.hpp"

namespace ezmfg {

namespace {

void check_config(const ModelParams& p, const SimConfig& cfg) {
    if (cfg.n_agents <= 0) throw ConfigError("n_agents must be positive");
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw ConfigError("dt and t_end must be positive");
    if (cfg.burn_in < 0.0 || cfg.burn_in >= cfg.t_end) {
        throw ConfigError("burn_in must lie in [0, t_end)");
    }
    const double dt_max = 0.01 * std::min(1.0 / p.lam[0], 1.0 / p.lam[1]);
    if (cfg.dt > dt_max * (1.0 + 1e-9)) {
        throw ConfigError("dt exceeds 0.01 min(1/lam_1, 1/lam_2)");
    }
}

// piecewise-linear sub-CDF G_j, with its atom at the left boundary
double sub_cdf(const StationaryMeasure& m, const Grid& grid, int j, double x) {
    const auto& cdf = m.cdf[j];
    const auto& gx = grid.x;
    const std::size_t n = gx.size();
    if (x < gx[0]) return 0.0;
    if (x >= gx[n - 1]) return cdf[n - 1];
    const std::size_t k = std::upper_bound(gx.begin(), gx.end(), x) - gx.begin() - 1;
    const double w = (x - gx[k]) / (gx[k + 1] - gx[k]);
    return cdf[k] + w * (cdf[k + 1] - cdf[k]);
}

}  // namespace

EmpiricalMeasure simulate(const HjbSolution& sol, const ModelParams& p, const Grid& grid,
                          const SimConfig& cfg) {
    validate(p, Mode::permissive);
    check_config(p, cfg);

    const int n = grid.n_nodes();
    const double* gx = grid.x.data();
    const double xl = grid.x_low();
    const double xm = grid.x_max();
    std::array<std::vector<double>, 2> slope;
    for (int j = 0; j < 2; ++j) {
        slope[j].resize(n - 1);
        for (int k = 0; k + 1 < n; ++k) {
            slope[j][k] = (sol.s[j][k + 1] - sol.s[j][k]) / grid.dx[k];
        }
    }

    const long long n_steps = std::llround(cfg.t_end / cfg.dt);
    const double dt = cfg.dt;
    const std::array<double, 2> p_switch = {p.lam[0] * dt, p.lam[1] * dt};
    // start the income chain at its stationary split
    const long n_low = std::lround(static_cast<double>(cfg.n_agents) * p.lam[1] /
                                   (p.lam[0] + p.lam[1]));
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(cfg.seed),
                                              static_cast<std::uint32_t>(cfg.seed >> 32)};

    EmpiricalMeasure emp;
    emp.wealth.resize(cfg.n_agents);
    emp.state.resize(cfg.n_agents);

    const bool parallel = cfg.parallel;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (long a = 0; a < cfg.n_agents; ++a) {
        double x = xl;
        int st = (a < n_low) ? 0 : 1;
        int cell = 0;
        long long step = 0;
        for (std::uint32_t blk = 0; step < n_steps; ++blk) {
            const auto words = Philox4x32::block(
                {static_cast<std::uint32_t>(a), blk,
                 static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) >> 32), 0},
                key);
            for (int lane = 0; lane < 4 && step < n_steps; ++lane, ++step) {
                double s;
                if (x >= xm) {
                    s = sol.s[st][n - 1];
                } else {
                    while (x < gx[cell]) --cell;
                    while (cell + 2 < n && x >= gx[cell + 1]) ++cell;
                    s = sol.s[st][cell] + (x - gx[cell]) * slope[st][cell];
                }
                x += s * dt;
                if (x < xl) x = xl;
                if (uniform01(words[lane]) < p_switch[st]) st ^= 1;
            }
        }
        emp.wealth[a] = x;
        emp.state[a] = static_cast<std::uint8_t>(st);
    }
    (void)parallel;

    const double cell0 = grid.x[1] - grid.x[0];
    for (long a = 0; a < cfg.n_agents; ++a) {
        if (emp.wealth[a] <= xl + cell0) {
            emp.boundary_fraction[emp.state[a]] += 1.0;
        }
    }
    emp.boundary_fraction[0] /= static_cast<double>(cfg.n_agents);
    emp.boundary_fraction[1] /= static_cast<double>(cfg.n_agents);
    return emp;
}

DistanceReport compare(const EmpiricalMeasure& emp, const StationaryMeasure& m, const Grid& grid) {
    const std::size_t n_tot = emp.wealth.size();
    if (n_tot == 0) throw DomainError("empty panel");
    const double n = static_cast<double>(n_tot);

    DistanceReport rep;
    for (int j = 0; j < 2; ++j) {
        std::vector<double> xs;
        xs.reserve(n_tot);
        for (std::size_t a = 0; a < n_tot; ++a) {
            if (emp.state[a] == j) xs.push_back(emp.wealth[a]);
        }
        std::sort(xs.begin(), xs.end());
        rep.occupancy[j] = static_cast<double>(xs.size()) / n;

        double ks = 0.0;
        std::size_t i = 0;
        while (i < xs.size()) {
            std::size_t i2 = i;
            while (i2 < xs.size() && xs[i2] == xs[i]) ++i2;
            const double v = xs[i];
            const double g_before = (v <= grid.x[0]) ? 0.0 : sub_cdf(m, grid, j, v);
            const double g_at = sub_cdf(m, grid, j, v);
            ks = std::max(ks, std::fabs(static_cast<double>(i) / n - g_before));
            ks = std::max(ks, std::fabs(static_cast<double>(i2) / n - g_at));
            i = i2;
        }
        ks = std::max(ks, std::fabs(static_cast<double>(xs.size()) / n - m.mass[j]));
        rep.ks[j] = ks;
    }
    rep.boundary_gap = std::fabs(m.mu[0] - emp.boundary_fraction[0]);
    return rep;
}

std::array<double, 2> ks_between(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.wealth.empty() || b.wealth.empty()) throw DomainError("empty panel");
    std::array<double, 2> out{0.0, 0.0};
    for (int j = 0; j < 2; ++j) {
        std::vector<double> xa, xb;
        for (std::size_t i = 0; i < a.wealth.size(); ++i) {
            if (a.state[i] == j) xa.push_back(a.wealth[i]);
        }
        for (std::size_t i = 0; i < b.wealth.size(); ++i) {
            if (b.state[i] == j) xb.push_back(b.wealth[i]);
        }
        std::sort(xa.begin(), xa.end());
        std::sort(xb.begin(), xb.end());
        const double na = static_cast<double>(a.wealth.size());
        const double nb = static_cast<double>(b.wealth.size());
        std::size_t i = 0, k = 0;
        double ks = 0.0;
        while (i < xa.size() || k < xb.size()) {
            double v;
            if (i == xa.size()) {
                v = xb[k];
            } else if (k == xb.size()) {
                v = xa[i];
            } else {
                v = std::min(xa[i], xb[k]);
            }
            ks = std::max(ks, std::fabs(static_cast<double>(i) / na -
                                        static_cast<double>(k) / nb));
            while (i < xa.size() && xa[i] == v) ++i;
            while (k < xb.size() && xb[k] == v) ++k;
            ks = std::max(ks, std::fabs(static_cast<double>(i) / na -
                                        static_cast<double>(k) / nb));
        }
        out[j] = ks;
    }
    return out;
}

}  // namespace ezmfg
