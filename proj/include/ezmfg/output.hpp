#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ezmfg/asymptotics.hpp"
#include "ezmfg/config.hpp"
#include "ezmfg/equilibrium.hpp"
#include "ezmfg/fpk.hpp"
#include "ezmfg/hjb.hpp"
#include "ezmfg/simulate.hpp"

namespace ezmfg {

// One sweep-r table row; numeric fields are empty when the row failed and
// error carries the reason. Row order always follows the input order.
struct SweepRow {
    double r = 0.0;
    std::optional<double> k_supply;
    std::optional<double> k_demand;
    std::optional<double> s2_at_xlow;
    std::optional<double> xhat;
    std::optional<double> mu1;
    std::string error;
};

// All artifact pieces the run may have produced; summary.json is written
// from this regardless of success so a failed run still documents itself.
struct RunArtifacts {
    std::optional<QualitativeReport> invariants;
    std::optional<DistanceReport> distances;
    std::optional<FarFieldReport> far_field;
    std::optional<NonexistenceReport> nonexistence;
    std::optional<BoundaryLayerReport> boundary;
    std::string rng_algorithm;  // named when a simulation ran
    std::string error;          // nonempty when the run failed
};

// CSV writers: header row, '.' decimal separator, 17 significant digits.
// Every numeric cell is checked finite before it reaches the file. When
// out.format is json the same table is mirrored next to the csv.
void write_values(const OutputConfig& out, const Grid& grid, const HjbSolution& sol);
void write_measure(const OutputConfig& out, const Grid& grid, const StationaryMeasure& m,
                   std::optional<double> xhat);
void write_simulate(const OutputConfig& out, const EmpiricalMeasure& emp);
void write_sweep(const OutputConfig& out, const std::vector<SweepRow>& rows);

void write_equilibrium(const OutputConfig& out, const EquilibriumResult& eq);
void write_asymptotics(const OutputConfig& out, const RunArtifacts& art);
void write_summary(const OutputConfig& out, const RunConfig& cfg, const RunArtifacts& art);

}  // namespace ezmfg
