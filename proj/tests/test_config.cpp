#include <string>

#include <doctest.h>

#include "ezmfg/config.hpp"
#include "ezmfg/errors.hpp"

using namespace ezmfg;

namespace {

const std::string kModelBlock =
    "[model]\n"
    "rho = 0.05\n"
    "gamma = 2.0\n"
    "psi = 0.4\n"
    "x_low = -0.15\n"
    "y1 = 0.1\n"
    "y2 = 0.5\n"
    "lam1 = 0.4\n"
    "lam2 = 0.4\n";

}  // namespace

TEST_CASE("minimal solve config and defaults") {
    RunConfig cfg = parse_config("mode = \"solve-hjb\"\n" + kModelBlock +
                                 "[solver]\nr = 0.03\n");
    CHECK(cfg.mode == RunMode::solve_hjb);
    CHECK(cfg.model.gamma == 2.0);
    CHECK(cfg.model.y[1] == 0.5);
    CHECK(cfg.r.has_value());
    CHECK(*cfg.r == 0.03);
    // defaults
    CHECK(cfg.grid.x_max == 15.0);
    CHECK(cfg.grid.cells == 2000);
    CHECK(cfg.grid.clustering == Clustering::sqrt_boundary);
    CHECK(cfg.assumptions == Mode::strict);
    CHECK(cfg.solve.tol == 1e-8);
    CHECK(cfg.output.dir == "out");
    CHECK(cfg.output.format == "csv");
    CHECK(cfg.sim.n_agents == 100000);
}

TEST_CASE("comments, quoting, and section routing") {
    RunConfig cfg = parse_config(
        "# full-line comment\n"
        "mode = \"simulate\"  # trailing comment\n" +
        kModelBlock +
        "[solver]\nr = 0.02\nmode = \"permissive\"\n"
        "[simulate]\nn_agents = 500\nseed = 9\nt_end = 50.0\nburn_in = 10.0\n"
        "[output]\ndir = \"some/dir\"\nformat = \"json\"\n");
    CHECK(cfg.mode == RunMode::simulate);
    CHECK(cfg.assumptions == Mode::permissive);
    CHECK(cfg.sim.n_agents == 500);
    CHECK(cfg.sim.seed == 9);
    CHECK(cfg.output.dir == "some/dir");
    CHECK(cfg.output.format == "json");
}

TEST_CASE("r_values arrays") {
    RunConfig cfg = parse_config("mode = \"sweep-r\"\n" + kModelBlock +
                                 "[sweep]\nr_values = [0.01, 0.02, 0.03]\n");
    REQUIRE(cfg.sweep_r.size() == 3);
    CHECK(cfg.sweep_r[1] == 0.02);
}

TEST_CASE("config rejections") {
    SUBCASE("unknown key") {
        CHECK_THROWS_AS(parse_config("mode = \"solve-hjb\"\n" + kModelBlock +
                                     "[solver]\nr = 0.03\nstep = 1\n"),
                        ConfigError);
    }
    SUBCASE("unknown section") {
        CHECK_THROWS_AS(parse_config("mode = \"solve-hjb\"\n" + kModelBlock +
                                     "[solvers]\nr = 0.03\n"),
                        ConfigError);
    }
    SUBCASE("duplicate key") {
        CHECK_THROWS_AS(parse_config("mode = \"solve-hjb\"\nmode = \"solve-fpk\"\n" +
                                     kModelBlock + "[solver]\nr = 0.03\n"),
                        ConfigError);
    }
    SUBCASE("missing required model key") {
        CHECK_THROWS_AS(parse_config("mode = \"solve-hjb\"\n[model]\nrho = 0.05\n"
                                     "[solver]\nr = 0.03\n"),
                        ConfigError);
    }
    SUBCASE("wrong type") {
        CHECK_THROWS_AS(parse_config("mode = \"solve-hjb\"\n" + kModelBlock +
                                     "[solver]\nr = \"three percent\"\n"),
                        ConfigError);
    }
    SUBCASE("non-integer cell count") {
        CHECK_THROWS_AS(parse_config("mode = \"solve-hjb\"\n" + kModelBlock +
                                     "[grid]\ncells = 200.5\n[solver]\nr = 0.03\n"),
                        ConfigError);
    }
    SUBCASE("unknown mode") {
        CHECK_THROWS_AS(parse_config("mode = \"explode\"\n" + kModelBlock), ConfigError);
    }
    SUBCASE("bad clustering") {
        CHECK_THROWS_AS(parse_config("mode = \"solve-hjb\"\n" + kModelBlock +
                                     "[grid]\nclustering = \"log\"\n[solver]\nr = 0.03\n"),
                        ConfigError);
    }
    SUBCASE("bad output format") {
        CHECK_THROWS_AS(parse_config("mode = \"solve-hjb\"\n" + kModelBlock +
                                     "[solver]\nr = 0.03\n[output]\nformat = \"xml\"\n"),
                        ConfigError);
    }
}

TEST_CASE("mode requirements") {
    SUBCASE("single solves need solver.r") {
        CHECK_THROWS_AS(parse_config("mode = \"solve-hjb\"\n" + kModelBlock), ConfigError);
        CHECK_THROWS_AS(parse_config("mode = \"simulate\"\n" + kModelBlock), ConfigError);
        CHECK_THROWS_AS(parse_config("mode = \"validate-asymptotics\"\n" + kModelBlock),
                        ConfigError);
    }
    SUBCASE("sweep needs rates") {
        CHECK_THROWS_AS(parse_config("mode = \"sweep-r\"\n" + kModelBlock), ConfigError);
        CHECK_THROWS_AS(parse_config("mode = \"sweep-r\"\n" + kModelBlock +
                                     "[sweep]\nr_values = []\n"),
                        ConfigError);
    }
    SUBCASE("equilibrium does not need solver.r") {
        RunConfig cfg = parse_config("mode = \"equilibrium\"\n" + kModelBlock +
                                     "[production]\nA = 0.95\nalpha = 0.35\ndelta = 0.1\n");
        CHECK(!cfg.r.has_value());
        CHECK(cfg.coupling == Coupling::aiyagari);
    }
}

TEST_CASE("model assumptions are enforced at parse time") {
    std::string text = "mode = \"solve-hjb\"\n" + kModelBlock + "[solver]\nr = 0.03\n";
    // gamma*psi = 1.6 under strict assumptions
    std::string bad = text;
    bad.replace(bad.find("psi = 0.4"), 9, "psi = 0.8");
    CHECK_THROWS_AS(parse_config(bad), AssumptionViolation);
    // the trailing line extends the open [solver] section
    RunConfig cfg = parse_config(bad + "mode = \"permissive\"\n");
    CHECK(cfg.assumptions == Mode::permissive);
}

TEST_CASE("grid sanity at parse time") {
    std::string base = "mode = \"solve-hjb\"\n" + kModelBlock + "[solver]\nr = 0.03\n";
    CHECK_THROWS_AS(parse_config(base + "[grid]\ncells = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(base + "[grid]\nx_max = -1.0\n"), ConfigError);
}

TEST_CASE("load_config surfaces missing files as config errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/path/run.toml"), ConfigError);
}

TEST_CASE("check_run_config re-validates after overrides") {
    RunConfig cfg = parse_config("mode = \"equilibrium\"\n" + kModelBlock +
                                 "[production]\nA = 0.95\nalpha = 0.35\ndelta = 0.1\n");
    cfg.mode = RunMode::solve_hjb;  // emulate a --mode override without solver.r
    CHECK_THROWS_AS(check_run_config(cfg), ConfigError);
    cfg.r = 0.03;
    CHECK_NOTHROW(check_run_config(cfg));
}

TEST_CASE("mode names round-trip") {
    for (RunMode m : {RunMode::solve_hjb, RunMode::solve_fpk, RunMode::equilibrium,
                      RunMode::sweep_r, RunMode::validate_asymptotics, RunMode::simulate}) {
        CHECK(parse_run_mode(run_mode_name(m)) == m);
    }
}
