#include "ezmfg/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ezmfg/errors.hpp"

namespace ezmfg {

namespace {

struct Value {
    enum class Kind { number, boolean, text, number_list };
    Kind kind = Kind::number;
    double num = 0.0;
    bool flag = false;
    std::string text;
    std::vector<double> list;
    int line = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, int line) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
        throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + tok +
                          "'");
    }
    return v;
}

Value parse_value(const std::string& raw, int line) {
    Value v;
    v.line = line;
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') {
            throw ConfigError("line " + std::to_string(line) + ": unterminated string");
        }
        v.kind = Value::Kind::text;
        v.text = s.substr(1, s.size() - 2);
        return v;
    }
    if (s.front() == '[') {
        if (s.back() != ']') {
            throw ConfigError("line " + std::to_string(line) + ": unterminated array");
        }
        v.kind = Value::Kind::number_list;
        std::string body = s.substr(1, s.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            v.list.push_back(parse_number(item, line));
        }
        return v;
    }
    if (s == "true" || s == "false") {
        v.kind = Value::Kind::boolean;
        v.flag = (s == "true");
        return v;
    }
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0') {
        v.kind = Value::Kind::number;
        v.num = d;
        return v;
    }
    v.kind = Value::Kind::text;
    v.text = s;
    return v;
}

class KeyTable {
  public:
    void insert(const std::string& section, const std::string& key, Value v) {
        const std::string full = section.empty() ? key : section + "." + key;
        if (!entries_.emplace(full, std::move(v)).second) {
            throw ConfigError("duplicate key '" + full + "'");
        }
    }

    const Value* take(const std::string& full, Value::Kind want) {
        auto it = entries_.find(full);
        if (it == entries_.end()) return nullptr;
        consumed_.insert(full);
        const Value& v = it->second;
        if (v.kind != want) {
            // numbers written where text is expected never coerce; report it
            throw ConfigError("line " + std::to_string(v.line) + ": key '" + full +
                              "' has the wrong type");
        }
        return &v;
    }

    double number(const std::string& full, double fallback) {
        const Value* v = take(full, Value::Kind::number);
        return v ? v->num : fallback;
    }

    std::optional<double> number_opt(const std::string& full) {
        const Value* v = take(full, Value::Kind::number);
        if (!v) return std::nullopt;
        return v->num;
    }

    long integer(const std::string& full, long fallback) {
        const Value* v = take(full, Value::Kind::number);
        if (!v) return fallback;
        const double r = std::round(v->num);
        if (std::fabs(v->num - r) > 1e-9) {
            throw ConfigError("line " + std::to_string(v->line) + ": key '" + full +
                              "' must be an integer");
        }
        return static_cast<long>(r);
    }

    bool boolean(const std::string& full, bool fallback) {
        const Value* v = take(full, Value::Kind::boolean);
        return v ? v->flag : fallback;
    }

    std::string text(const std::string& full, const std::string& fallback) {
        const Value* v = take(full, Value::Kind::text);
        return v ? v->text : fallback;
    }

    std::optional<std::vector<double>> list(const std::string& full) {
        const Value* v = take(full, Value::Kind::number_list);
        if (!v) return std::nullopt;
        return v->list;
    }

    void require(const std::string& full) {
        if (entries_.find(full) == entries_.end()) {
            throw ConfigError("missing required key '" + full + "'");
        }
    }

    void reject_unknown() const {
        for (const auto& [full, v] : entries_) {
            if (consumed_.find(full) == consumed_.end()) {
                throw ConfigError("line " + std::to_string(v.line) + ": unknown key '" + full +
                                  "'");
            }
        }
    }

  private:
    std::map<std::string, Value> entries_;
    std::set<std::string> consumed_;
};

KeyTable tokenize(const std::string& text) {
    KeyTable table;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        // strip comments, respecting quoted strings
        bool in_quote = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quote = !in_quote;
            if (line[i] == '#' && !in_quote) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        table.insert(section, key, parse_value(line.substr(eq + 1), lineno));
    }
    return table;
}

}  // namespace

RunMode parse_run_mode(const std::string& s) {
    if (s == "solve-hjb") return RunMode::solve_hjb;
    if (s == "solve-fpk") return RunMode::solve_fpk;
    if (s == "equilibrium") return RunMode::equilibrium;
    if (s == "sweep-r") return RunMode::sweep_r;
    if (s == "validate-asymptotics") return RunMode::validate_asymptotics;
    if (s == "simulate") return RunMode::simulate;
    throw ConfigError("unknown mode '" + s + "'");
}

const char* run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::solve_hjb: return "solve-hjb";
        case RunMode::solve_fpk: return "solve-fpk";
        case RunMode::equilibrium: return "equilibrium";
        case RunMode::sweep_r: return "sweep-r";
        case RunMode::validate_asymptotics: return "validate-asymptotics";
        case RunMode::simulate: return "simulate";
    }
    return "?";
}

RunConfig parse_config(const std::string& text) {
    KeyTable t = tokenize(text);
    RunConfig cfg;

    t.require("mode");
    cfg.mode = parse_run_mode(t.text("mode", ""));

    for (const char* k : {"model.rho", "model.gamma", "model.psi", "model.x_low", "model.y1",
                          "model.y2", "model.lam1", "model.lam2"}) {
        t.require(k);
    }
    cfg.model.rho = t.number("model.rho", 0.0);
    cfg.model.gamma = t.number("model.gamma", 0.0);
    cfg.model.psi = t.number("model.psi", 0.0);
    cfg.model.x_low = t.number("model.x_low", 0.0);
    cfg.model.y = {t.number("model.y1", 0.0), t.number("model.y2", 0.0)};
    cfg.model.lam = {t.number("model.lam1", 0.0), t.number("model.lam2", 0.0)};

    cfg.production.A = t.number("production.A", cfg.production.A);
    cfg.production.alpha = t.number("production.alpha", cfg.production.alpha);
    cfg.production.delta = t.number("production.delta", cfg.production.delta);
    cfg.production.B = t.number("production.B", cfg.production.B);

    cfg.grid.x_max = t.number("grid.x_max", cfg.grid.x_max);
    cfg.grid.cells = static_cast<int>(t.integer("grid.cells", cfg.grid.cells));
    const std::string clus = t.text("grid.clustering", "sqrt");
    if (clus == "sqrt" || clus == "sqrt_boundary") {
        cfg.grid.clustering = Clustering::sqrt_boundary;
    } else if (clus == "uniform") {
        cfg.grid.clustering = Clustering::none;
    } else {
        throw ConfigError("grid.clustering must be sqrt or uniform, got '" + clus + "'");
    }

    cfg.solve.tol = t.number("solver.tol", cfg.solve.tol);
    cfg.solve.max_iter = static_cast<int>(t.integer("solver.max_iter", cfg.solve.max_iter));
    cfg.solve.time_step = t.number("solver.time_step", cfg.solve.time_step);
    cfg.solve.parallel = t.boolean("solver.parallel", cfg.solve.parallel);
    const std::string mode = t.text("solver.mode", "strict");
    if (mode == "strict") {
        cfg.assumptions = Mode::strict;
    } else if (mode == "permissive") {
        cfg.assumptions = Mode::permissive;
    } else {
        throw ConfigError("solver.mode must be strict or permissive, got '" + mode + "'");
    }
    cfg.r = t.number_opt("solver.r");

    const std::string coupling = t.text("equilibrium.coupling", "aiyagari");
    if (coupling == "aiyagari") {
        cfg.coupling = Coupling::aiyagari;
    } else if (coupling == "huggett") {
        cfg.coupling = Coupling::huggett;
    } else {
        throw ConfigError("equilibrium.coupling must be aiyagari or huggett, got '" + coupling +
                          "'");
    }
    cfg.equilibrium.r_lo = t.number("equilibrium.r_lo", cfg.equilibrium.r_lo);
    cfg.equilibrium.r_hi = t.number("equilibrium.r_hi", cfg.equilibrium.r_hi);
    cfg.equilibrium.tol_r = t.number("equilibrium.tol_r", cfg.equilibrium.tol_r);
    cfg.equilibrium.max_bisect =
        static_cast<int>(t.integer("equilibrium.max_bisect", cfg.equilibrium.max_bisect));

    cfg.sim.n_agents = t.integer("simulate.n_agents", cfg.sim.n_agents);
    cfg.sim.t_end = t.number("simulate.t_end", cfg.sim.t_end);
    cfg.sim.dt = t.number("simulate.dt", cfg.sim.dt);
    cfg.sim.burn_in = t.number("simulate.burn_in", cfg.sim.burn_in);
    cfg.sim.seed = static_cast<std::uint64_t>(t.integer("simulate.seed", 1));
    cfg.sim.parallel = t.boolean("simulate.parallel", cfg.sim.parallel);

    cfg.asymptotics.window_lo = t.number("asymptotics.window_lo", cfg.asymptotics.window_lo);
    cfg.asymptotics.window_hi = t.number("asymptotics.window_hi", cfg.asymptotics.window_hi);
    cfg.asymptotics.fit_nodes =
        static_cast<int>(t.integer("asymptotics.fit_nodes", cfg.asymptotics.fit_nodes));
    cfg.asymptotics.farfield_tol =
        t.number("asymptotics.farfield_tol", cfg.asymptotics.farfield_tol);
    cfg.asymptotics.ratio_tol = t.number("asymptotics.ratio_tol", cfg.asymptotics.ratio_tol);

    if (auto rs = t.list("sweep.r_values")) cfg.sweep_r = *rs;

    cfg.output.dir = t.text("output.dir", cfg.output.dir);
    cfg.output.format = t.text("output.format", cfg.output.format);
    if (cfg.output.format != "csv" && cfg.output.format != "json") {
        throw ConfigError("output.format must be csv or json, got '" + cfg.output.format + "'");
    }

    t.reject_unknown();
    check_run_config(cfg);
    return cfg;
}

void check_run_config(const RunConfig& cfg) {
    const bool needs_r = cfg.mode == RunMode::solve_hjb || cfg.mode == RunMode::solve_fpk ||
                         cfg.mode == RunMode::validate_asymptotics || cfg.mode == RunMode::simulate;
    if (needs_r && !cfg.r) {
        throw ConfigError("mode " + std::string(run_mode_name(cfg.mode)) +
                          " requires solver.r");
    }
    if (cfg.mode == RunMode::sweep_r && cfg.sweep_r.empty()) {
        throw ConfigError("mode sweep-r requires a nonempty sweep.r_values");
    }

    validate(cfg.model, cfg.assumptions);
    if (cfg.mode == RunMode::equilibrium && cfg.coupling == Coupling::aiyagari) {
        validate_production(cfg.production);
    }
    if (!(cfg.grid.x_max > cfg.model.x_low)) {
        throw ConfigError("grid.x_max must exceed model.x_low");
    }
    if (cfg.grid.cells < 100) {
        throw ConfigError("grid.cells must be at least 100");
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_reference() {
    return "config keys (sectioned key = value, # comments, unknown keys rejected):\n"
           "  mode                    solve-hjb | solve-fpk | equilibrium | sweep-r |\n"
           "                          validate-asymptotics | simulate\n"
           "  [model]    rho gamma psi x_low y1 y2 lam1 lam2      (all required)\n"
           "  [production] A alpha delta B\n"
           "  [grid]     x_max cells clustering(sqrt|uniform)\n"
           "  [solver]   tol max_iter time_step parallel mode(strict|permissive)\n"
           "             r    (required by solve-hjb, solve-fpk,\n"
           "                   validate-asymptotics, simulate)\n"
           "  [equilibrium] coupling(aiyagari|huggett) r_lo r_hi tol_r max_bisect\n"
           "  [simulate] n_agents t_end dt burn_in seed parallel\n"
           "  [asymptotics] window_lo window_hi fit_nodes farfield_tol ratio_tol\n"
           "  [sweep]    r_values = [r1, r2, ...]\n"
           "  [output]   dir format(csv|json)\n";
}

}  // namespace ezmfg
