#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ezmfg/equilibrium.hpp"
#include "ezmfg/grid.hpp"
#include "ezmfg/hjb.hpp"
#include "ezmfg/model.hpp"
#include "ezmfg/simulate.hpp"

namespace ezmfg {

enum class RunMode { solve_hjb, solve_fpk, equilibrium, sweep_r, validate_asymptotics, simulate };

struct GridConfig {
    double x_max = 15.0;
    int cells = 2000;
    Clustering clustering = Clustering::sqrt_boundary;
};

struct AsymptoticsConfig {
    double window_lo = 50.0;
    double window_hi = 180.0;
    int fit_nodes = 10;
    double farfield_tol = 0.10;
    double ratio_tol = 0.15;
};

struct OutputConfig {
    std::string dir = "out";
    std::string format = "csv";  // csv, or json to mirror the tables as .json
};

struct RunConfig {
    RunMode mode = RunMode::solve_hjb;
    ModelParams model{};
    ProductionParams production{};
    GridConfig grid{};
    SolveOpts solve{};
    Mode assumptions = Mode::strict;
    std::optional<double> r;  // single-solve interest rate, [solver] r
    Coupling coupling = Coupling::aiyagari;
    EquilibriumOpts equilibrium{};
    SimConfig sim{};
    AsymptoticsConfig asymptotics{};
    std::vector<double> sweep_r;
    OutputConfig output{};
};

// Parses the sectioned key = value config format (see config_reference()
// for every key). Unknown sections or keys are hard errors; model
// parameters are validated before returning.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Re-checks mode requirements, model assumptions, and grid sanity.
// parse_config runs this; the CLI runs it again after flag overrides.
void check_run_config(const RunConfig& cfg);

// one-line-per-key reference of the accepted config keys, shown by --help
std::string config_reference();

const char* run_mode_name(RunMode m);
RunMode parse_run_mode(const std::string& s);

}  // namespace ezmfg
