#include "ezmfg/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ezmfg/errors.hpp"
#include "ezmfg/model.hpp"

namespace ezmfg {

namespace {

using nlohmann::json;

double checked(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw Error(std::string("refusing to write non-finite value for ") + what);
    }
    return x;
}

std::filesystem::path prepare_dir(const OutputConfig& out) {
    std::filesystem::path dir(out.dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct CsvFile {
    explicit CsvFile(const std::filesystem::path& path) : f(std::fopen(path.string().c_str(), "w")) {
        if (f == nullptr) {
            throw Error("cannot open " + path.string() + " for writing");
        }
    }
    ~CsvFile() {
        if (f != nullptr) std::fclose(f);
    }
    CsvFile(const CsvFile&) = delete;
    CsvFile& operator=(const CsvFile&) = delete;

    void raw(const char* s) { std::fputs(s, f); }
    void num(double x) { std::fprintf(f, "%.17g", x); }
    void sep() { std::fputc(',', f); }
    void endl() { std::fputc('\n', f); }

    std::FILE* f;
};

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    f << j.dump(2) << '\n';
}

json model_json(const ModelParams& p, Mode mode) {
    DerivedConstants d = validate(p, mode);
    json j;
    j["rho"] = p.rho;
    j["gamma"] = p.gamma;
    j["psi"] = p.psi;
    j["x_low"] = p.x_low;
    j["y"] = {p.y[0], p.y[1]};
    j["lambda"] = {p.lam[0], p.lam[1]};
    j["theta"] = d.theta;
    j["zeta"] = d.zeta;
    j["gamma_psi_warning"] = d.gamma_psi_warning;
    return j;
}

json invariants_json(const QualitativeReport& q) {
    json j;
    j["increasing"] = q.increasing;
    j["concave"] = q.concave;
    j["envelope_ok"] = q.envelope_ok;
    j["v2_above_v1"] = q.v2_above_v1;
    j["s1_zero_at_boundary"] = q.s1_zero_at_boundary;
    j["s1_negative_interior"] = q.s1_negative_interior;
    j["consumption_positive"] = q.consumption_positive;
    j["dv1_above_dv2_at_boundary"] = q.dv1_above_dv2_at_boundary;
    j["s2_sign_change"] = q.s2_sign_change;
    j["all"] = q.all();
    return j;
}

std::optional<double> opt_checked(std::optional<double> x, const char* what) {
    if (x && !std::isfinite(*x)) {
        throw Error(std::string("refusing to write non-finite value for ") + what);
    }
    return x;
}

}  // namespace

void write_values(const OutputConfig& out, const Grid& grid, const HjbSolution& sol) {
    auto dir = prepare_dir(out);
    CsvFile csv(dir / "values.csv");
    csv.raw("x,v1,v2,c1,c2,s1,s2\n");
    int n = grid.n_nodes();
    for (int k = 0; k < n; ++k) {
        csv.num(checked(grid.x[k], "x"));
        for (const auto* col : {&sol.v, &sol.c, &sol.s}) {
            for (int j = 0; j < 2; ++j) {
                csv.sep();
                csv.num(checked((*col)[j][k], "values table"));
            }
        }
        csv.endl();
    }
    if (out.format == "json") {
        json j;
        j["x"] = grid.x;
        for (int s = 0; s < 2; ++s) {
            std::string tag = std::to_string(s + 1);
            j["v" + tag] = sol.v[s];
            j["c" + tag] = sol.c[s];
            j["s" + tag] = sol.s[s];
        }
        write_json_file(dir / "values.json", j);
    }
}

void write_measure(const OutputConfig& out, const Grid& grid, const StationaryMeasure& m,
                   std::optional<double> xhat) {
    auto dir = prepare_dir(out);
    CsvFile csv(dir / "measure.csv");
    std::fprintf(csv.f, "# mu1=%.17g mu2=%.17g", checked(m.mu[0], "mu1"),
                 checked(m.mu[1], "mu2"));
    if (auto v = opt_checked(xhat, "xhat")) {
        std::fprintf(csv.f, " xhat=%.17g", *v);
    }
    csv.endl();
    csv.raw("x,g1,g2,G1,G2\n");
    int n = grid.n_nodes();
    for (int k = 0; k < n; ++k) {
        csv.num(checked(grid.x[k], "x"));
        for (int j = 0; j < 2; ++j) {
            csv.sep();
            csv.num(checked(m.g[j][k], "density"));
        }
        for (int j = 0; j < 2; ++j) {
            csv.sep();
            csv.num(checked(m.cdf[j][k], "cdf"));
        }
        csv.endl();
    }
    if (out.format == "json") {
        json j;
        j["mu"] = {m.mu[0], m.mu[1]};
        if (xhat) j["xhat"] = *xhat;
        j["mass"] = {m.mass[0], m.mass[1]};
        j["support_end"] = m.support_end;
        j["degenerate"] = m.degenerate;
        j["x"] = grid.x;
        j["g1"] = m.g[0];
        j["g2"] = m.g[1];
        j["G1"] = m.cdf[0];
        j["G2"] = m.cdf[1];
        write_json_file(dir / "measure.json", j);
    }
}

void write_simulate(const OutputConfig& out, const EmpiricalMeasure& emp) {
    auto dir = prepare_dir(out);
    CsvFile csv(dir / "simulate.csv");
    csv.raw("agent_id,wealth,state\n");
    for (std::size_t i = 0; i < emp.wealth.size(); ++i) {
        std::fprintf(csv.f, "%zu,%.17g,%d\n", i, checked(emp.wealth[i], "wealth"),
                     static_cast<int>(emp.state[i]) + 1);
    }
    if (out.format == "json") {
        json j;
        j["boundary_fraction"] = {emp.boundary_fraction[0], emp.boundary_fraction[1]};
        for (std::size_t i = 0; i < emp.wealth.size(); ++i) {
            j["wealth"].push_back(emp.wealth[i]);
            j["state"].push_back(static_cast<int>(emp.state[i]) + 1);
        }
        write_json_file(dir / "simulate.json", j);
    }
}

void write_sweep(const OutputConfig& out, const std::vector<SweepRow>& rows) {
    auto dir = prepare_dir(out);
    CsvFile csv(dir / "sweep.csv");
    csv.raw("r,K_supply,K_demand,s2_at_xlow,xhat,mu1,error\n");
    for (const auto& row : rows) {
        csv.num(checked(row.r, "r"));
        for (const auto* cell :
             {&row.k_supply, &row.k_demand, &row.s2_at_xlow, &row.xhat, &row.mu1}) {
            csv.sep();
            if (auto v = opt_checked(*cell, "sweep table")) csv.num(*v);
        }
        csv.sep();
        // Errors are messages, not data: quote so commas cannot split the row.
        std::fputc('"', csv.f);
        for (char ch : row.error) {
            if (ch == '"') std::fputc('"', csv.f);
            std::fputc(ch, csv.f);
        }
        std::fputc('"', csv.f);
        csv.endl();
    }
    if (out.format == "json") {
        json j = json::array();
        for (const auto& row : rows) {
            json rj;
            rj["r"] = row.r;
            auto put = [&rj](const char* key, const std::optional<double>& v) {
                if (v) {
                    rj[key] = *v;
                } else {
                    rj[key] = nullptr;
                }
            };
            put("K_supply", row.k_supply);
            put("K_demand", row.k_demand);
            put("s2_at_xlow", row.s2_at_xlow);
            put("xhat", row.xhat);
            put("mu1", row.mu1);
            rj["error"] = row.error;
            j.push_back(rj);
        }
        write_json_file(dir / "sweep.json", j);
    }
}

void write_equilibrium(const OutputConfig& out, const EquilibriumResult& eq) {
    auto dir = prepare_dir(out);
    json j;
    j["r_star"] = checked(eq.r_star, "r_star");
    j["K"] = checked(eq.K, "K");
    j["N"] = checked(eq.N, "N");
    j["residual"] = checked(eq.residual, "residual");
    j["bracket"] = {eq.bracket.first, eq.bracket.second};
    j["iterations"] = eq.evaluations;
    write_json_file(dir / "equilibrium.json", j);
}

void write_asymptotics(const OutputConfig& out, const RunArtifacts& art) {
    auto dir = prepare_dir(out);
    json j;
    if (art.far_field) {
        const auto& ff = *art.far_field;
        j["far_field"] = {{"max_rel_err", checked(ff.max_rel_err, "far-field error")},
                          {"monotone_approach", ff.monotone_approach},
                          {"nodes_checked", ff.nodes_checked},
                          {"tol", ff.tol},
                          {"pass", ff.pass}};
    }
    if (art.nonexistence) {
        const auto& ne = *art.nonexistence;
        j["nonexistence_ratio"] = {{"max_rel_err", checked(ne.max_rel_err, "ratio error")},
                                   {"fitted_power", checked(ne.fitted_power, "fitted power")},
                                   {"nodes_checked", ne.nodes_checked},
                                   {"tol", ne.tol},
                                   {"pass", ne.pass}};
    }
    if (art.boundary) {
        const auto& bl = *art.boundary;
        j["boundary_layer"] = {{"kappa", checked(bl.layer.kappa, "kappa")},
                               {"sqrt_coeff", checked(bl.layer.sqrt_coeff, "sqrt coefficient")},
                               {"fitted_exponent", checked(bl.fitted_exponent, "fitted exponent")},
                               {"fitted_coeff", checked(bl.fitted_coeff, "fitted coefficient")},
                               {"control_exponent", checked(bl.control_exponent, "control exponent")},
                               {"fit_nodes", bl.fit_nodes},
                               {"pass", bl.pass}};
    }
    write_json_file(dir / "asymptotics.json", j);
}

void write_summary(const OutputConfig& out, const RunConfig& cfg, const RunArtifacts& art) {
    auto dir = prepare_dir(out);
    json j;
    j["mode"] = run_mode_name(cfg.mode);
    j["model"] = model_json(cfg.model, cfg.assumptions);
    j["assumptions"] = cfg.assumptions == Mode::strict ? "strict" : "permissive";
    j["grid"] = {{"x_max", cfg.grid.x_max},
                 {"cells", cfg.grid.cells},
                 {"clustering", cfg.grid.clustering == Clustering::none ? "uniform" : "sqrt"}};
    if (cfg.r) j["r"] = *cfg.r;
    if (cfg.mode == RunMode::equilibrium || cfg.mode == RunMode::sweep_r) {
        j["production"] = {{"A", cfg.production.A},
                           {"alpha", cfg.production.alpha},
                           {"delta", cfg.production.delta}};
        j["coupling"] = cfg.coupling == Coupling::huggett ? "huggett" : "aiyagari";
    }
    j["solver"] = {{"tol", cfg.solve.tol},
                   {"max_iter", cfg.solve.max_iter},
                   {"time_step", cfg.solve.time_step}};
    if (cfg.mode == RunMode::equilibrium) {
        j["equilibrium_opts"] = {{"tol_r", cfg.equilibrium.tol_r},
                                 {"max_bisect", cfg.equilibrium.max_bisect}};
    }
    if (art.invariants) j["invariants"] = invariants_json(*art.invariants);
    if (art.distances) {
        const auto& d = *art.distances;
        j["distances"] = {{"ks", {checked(d.ks[0], "ks"), checked(d.ks[1], "ks")}},
                          {"boundary_gap", checked(d.boundary_gap, "boundary gap")},
                          {"occupancy", {d.occupancy[0], d.occupancy[1]}}};
    }
    if (!art.rng_algorithm.empty()) j["rng"] = art.rng_algorithm;
    if (!art.error.empty()) j["error"] = art.error;
    write_json_file(dir / "summary.json", j);
}

}  // namespace ezmfg
