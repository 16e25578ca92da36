#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "ezmfg/asymptotics.hpp"
#include "ezmfg/config.hpp"
#include "ezmfg/equilibrium.hpp"
#include "ezmfg/errors.hpp"
#include "ezmfg/fpk.hpp"
#include "ezmfg/hjb.hpp"
#include "ezmfg/output.hpp"
#include "ezmfg/rng.hpp"
#include "ezmfg/simulate.hpp"

namespace {

using namespace ezmfg;

std::optional<double> try_xhat(const HjbSolution& sol, const Grid& grid) {
    try {
        return find_xhat(sol.s[1], grid);
    } catch (const Error&) {
        return std::nullopt;
    }
}

void run_single(const RunConfig& cfg, const Grid& grid, RunArtifacts& art) {
    HjbSolution sol = solve_hjb(cfg.model, *cfg.r, grid, cfg.solve, cfg.assumptions);
    art.invariants = assert_qualitative(sol, cfg.model, *cfg.r, grid);
    write_values(cfg.output, grid, sol);
    if (cfg.mode == RunMode::solve_hjb) return;

    StationaryMeasure m = closed_form_measure(sol, cfg.model, grid);
    write_measure(cfg.output, grid, m, try_xhat(sol, grid));

    if (cfg.mode == RunMode::simulate) {
        EmpiricalMeasure emp = simulate(sol, cfg.model, grid, cfg.sim);
        art.distances = compare(emp, m, grid);
        art.rng_algorithm = Philox4x32::algorithm;
        write_simulate(cfg.output, emp);
    }
}

void run_equilibrium(const RunConfig& cfg, const Grid& grid, RunArtifacts& art) {
    EquilibriumOpts opts = cfg.equilibrium;
    opts.solve = cfg.solve;
    opts.mode = cfg.assumptions;
    EquilibriumResult eq = solve_equilibrium(cfg.model, cfg.production, grid, cfg.coupling, opts);
    art.invariants = assert_qualitative(eq.solution, cfg.model, eq.r_star, grid);
    write_equilibrium(cfg.output, eq);
    write_values(cfg.output, grid, eq.solution);
    write_measure(cfg.output, grid, eq.measure, try_xhat(eq.solution, grid));
}

void run_sweep(const RunConfig& cfg, const Grid& grid) {
    const double labor = aggregate_labor(cfg.model);
    std::vector<SweepRow> rows;
    rows.reserve(cfg.sweep_r.size());
    for (double r : cfg.sweep_r) {
        SweepRow row;
        row.r = r;
        try {
            row.k_demand = capital_demand(r, cfg.production, labor);
        } catch (const Error&) {
            // demand side is optional in a sweep; supply alone is the diagnostic
        }
        try {
            HjbSolution sol = solve_hjb(cfg.model, r, grid, cfg.solve, cfg.assumptions);
            StationaryMeasure m = closed_form_measure(sol, cfg.model, grid);
            row.k_supply = aggregate_capital(m, grid);
            row.s2_at_xlow = sol.s[1][0];
            row.xhat = try_xhat(sol, grid);
            row.mu1 = m.mu[0];
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    write_sweep(cfg.output, rows);
}

void run_asymptotics(const RunConfig& cfg, const Grid& grid, RunArtifacts& art) {
    const double r = *cfg.r;
    HjbSolution sol = solve_hjb(cfg.model, r, grid, cfg.solve, cfg.assumptions);
    art.invariants = assert_qualitative(sol, cfg.model, r, grid);
    write_values(cfg.output, grid, sol);

    const auto& ac = cfg.asymptotics;
    if (r < cfg.model.rho - 1e-12) {
        art.boundary = boundary_layer(sol, cfg.model, r, grid, ac.fit_nodes);
    } else {
        std::pair<double, double> window{ac.window_lo, ac.window_hi};
        art.far_field = validate_far_field(sol, cfg.model, grid, window, ac.farfield_tol);
        art.nonexistence = nonexistence_ratio(sol, cfg.model, grid, window, ac.ratio_tol);
    }
    write_asymptotics(cfg.output, art);
}

int run(const RunConfig& cfg) {
    RunArtifacts art;
    try {
        Grid grid = build_grid(cfg.model.x_low, cfg.grid.x_max, cfg.grid.cells,
                               cfg.grid.clustering);
        switch (cfg.mode) {
            case RunMode::solve_hjb:
            case RunMode::solve_fpk:
            case RunMode::simulate:
                run_single(cfg, grid, art);
                break;
            case RunMode::equilibrium:
                run_equilibrium(cfg, grid, art);
                break;
            case RunMode::sweep_r:
                run_sweep(cfg, grid);
                break;
            case RunMode::validate_asymptotics:
                run_asymptotics(cfg, grid, art);
                break;
        }
        write_summary(cfg.output, cfg, art);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        art.error = e.what();
        try {
            write_summary(cfg.output, cfg, art);
        } catch (const std::exception&) {
            // the summary is best effort once the run has already failed
        }
        return 2;
    }
    if (art.invariants && !art.invariants->all()) {
        std::fprintf(stderr, "warning: qualitative invariants violated:\n%s",
                     art.invariants->describe().c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary mean field games with Epstein-Zin preferences"};
    std::string config_path;
    std::string mode_str;
    std::string out_dir;
    long long seed = -1;
    bool strict = false;
    bool permissive = false;
    app.add_option("--config", config_path, "path to a run config file")->required();
    app.add_option("--mode", mode_str,
                   "override the config mode (solve-hjb, solve-fpk, equilibrium, sweep-r, "
                   "validate-asymptotics, simulate)");
    app.add_option("--out", out_dir, "override the output directory");
    app.add_flag("--strict", strict, "require gamma*psi < 1");
    app.add_flag("--permissive", permissive, "accept gamma*psi >= 1 with a warning");
    app.add_option("--seed", seed, "override the simulation seed");
    app.footer(config_reference());
    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!mode_str.empty()) cfg.mode = parse_run_mode(mode_str);
        if (!out_dir.empty()) cfg.output.dir = out_dir;
        if (strict && permissive) {
            throw ConfigError("--strict and --permissive are mutually exclusive");
        }
        if (strict) cfg.assumptions = Mode::strict;
        if (permissive) cfg.assumptions = Mode::permissive;
        if (seed >= 0) cfg.sim.seed = static_cast<std::uint64_t>(seed);
        check_run_config(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 3;
    }
    return run(cfg);
}
