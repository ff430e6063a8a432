#include "chq/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace chq {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    std::size_t line = 0;
};

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw config_error("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const Entry& e, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(e.value, &pos);
    } catch (const std::exception&) {
        fail(e.line, "key " + key + ": expected a number, got '" + e.value + "'");
    }
    if (pos != e.value.size()) fail(e.line, "key " + key + ": trailing characters in '" + e.value + "'");
    return v;
}

int parse_int(const Entry& e, const std::string& key) {
    const double v = parse_double(e, key);
    if (v != std::floor(v)) fail(e.line, "key " + key + ": expected an integer");
    return int(v);
}

std::vector<double> parse_list(const Entry& e, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(e.line, "key " + key + ": empty list element");
        std::size_t pos = 0;
        try {
            out.push_back(std::stod(item, &pos));
        } catch (const std::exception&) {
            fail(e.line, "key " + key + ": expected a number, got '" + item + "'");
        }
        if (pos != item.size()) fail(e.line, "key " + key + ": bad list element '" + item + "'");
    }
    if (out.empty()) fail(e.line, "key " + key + ": empty list");
    return out;
}

const char* const kKnownKeys[] = {
    "problem.N", "problem.p", "problem.alpha", "problem.kind", "problem.q",
    "grid.R", "grid.M", "grid.scheme",
    "solver.max_iter", "solver.grad_tol", "solver.step0", "solver.backtrack",
    "solver.seed", "solver.seed_width", "solver.seed_path",
    "verify.k_values", "verify.moser_steps", "verify.degiorgi_levels",
    "verify.decay_window", "verify.r_exp",
    "output.profile_path", "output.report_path",
};

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);

    std::map<std::string, Entry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(lineno, "missing key");
        if (value.empty()) fail(lineno, "missing value for key " + key);
        bool known = false;
        for (const char* k : kKnownKeys) known = known || key == k;
        if (!known) fail(lineno, "unknown key '" + key + "'");
        if (entries.count(key)) fail(lineno, "duplicate key '" + key + "'");
        entries[key] = Entry{value, lineno};
    }

    auto required = [&](const std::string& key) -> const Entry& {
        const auto it = entries.find(key);
        if (it == entries.end()) throw config_error("config: missing required key '" + key + "'");
        return it->second;
    };
    auto optional = [&](const std::string& key) -> const Entry* {
        const auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };

    RunConfig cfg;
    cfg.dimension = parse_int(required("problem.N"), "problem.N");
    cfg.p = parse_double(required("problem.p"), "problem.p");
    cfg.p_text = required("problem.p").value;
    cfg.alpha = parse_double(required("problem.alpha"), "problem.alpha");
    cfg.alpha_text = required("problem.alpha").value;
    if (const Entry* e = optional("problem.kind")) {
        cfg.kind = e->value;
        if (cfg.kind != "power")
            fail(e->line, "problem.kind: only 'power' is configurable (custom kinds are API-only)");
    }
    cfg.q = parse_double(required("problem.q"), "problem.q");
    cfg.q_text = required("problem.q").value;

    cfg.max_radius = parse_double(required("grid.R"), "grid.R");
    cfg.node_count = parse_int(required("grid.M"), "grid.M");
    if (const Entry* e = optional("grid.scheme")) {
        if (e->value == "uniform") cfg.scheme = GridScheme::uniform;
        else if (e->value == "graded") cfg.scheme = GridScheme::graded;
        else fail(e->line, "grid.scheme: expected 'uniform' or 'graded'");
    }

    if (const Entry* e = optional("solver.max_iter")) cfg.solver.max_iter = parse_int(*e, "solver.max_iter");
    if (const Entry* e = optional("solver.grad_tol")) cfg.solver.grad_tol = parse_double(*e, "solver.grad_tol");
    if (const Entry* e = optional("solver.step0")) cfg.solver.step0 = parse_double(*e, "solver.step0");
    if (const Entry* e = optional("solver.backtrack")) cfg.solver.backtrack = parse_double(*e, "solver.backtrack");
    if (const Entry* e = optional("solver.seed")) {
        if (e->value == "gaussian") cfg.solver.seed.kind = SeedSpec::Kind::gaussian;
        else if (e->value == "csv") cfg.solver.seed.kind = SeedSpec::Kind::csv;
        else fail(e->line, "solver.seed: expected 'gaussian' or 'csv'");
    }
    if (const Entry* e = optional("solver.seed_width")) cfg.solver.seed.width = parse_double(*e, "solver.seed_width");
    if (const Entry* e = optional("solver.seed_path")) cfg.solver.seed.path = e->value;
    if (cfg.solver.seed.kind == SeedSpec::Kind::csv && cfg.solver.seed.path.empty())
        throw config_error("config: solver.seed = csv requires solver.seed_path");

    if (const Entry* e = optional("verify.k_values")) cfg.k_values = parse_list(*e, "verify.k_values");
    else cfg.k_values = {cfg.max_radius / 8.0, cfg.max_radius / 4.0, cfg.max_radius / 2.0};
    if (const Entry* e = optional("verify.moser_steps")) cfg.moser_steps = parse_int(*e, "verify.moser_steps");
    if (const Entry* e = optional("verify.degiorgi_levels"))
        cfg.degiorgi_levels = parse_int(*e, "verify.degiorgi_levels");
    if (const Entry* e = optional("verify.decay_window")) {
        const auto window = parse_list(*e, "verify.decay_window");
        if (window.size() != 2) fail(e->line, "verify.decay_window: expected two values");
        cfg.decay_window_lo = window[0];
        cfg.decay_window_hi = window[1];
    } else {
        cfg.decay_window_lo = 0.4 * cfg.max_radius;
        cfg.decay_window_hi = 0.7 * cfg.max_radius;
    }
    if (const Entry* e = optional("verify.r_exp")) cfg.r_exp = parse_double(*e, "verify.r_exp");

    if (const Entry* e = optional("output.profile_path")) cfg.profile_path = e->value;
    if (const Entry* e = optional("output.report_path")) cfg.report_path = e->value;

    // Reject every parameter combination outside the standing hypotheses
    // before any computation happens.
    cfg.problem();
    if (cfg.max_radius <= 0.0) throw config_error("config: grid.R must be positive");
    if (cfg.node_count < 8) throw config_error("config: grid.M must be at least 8");
    cfg.solver.validate();
    for (double k : cfg.k_values)
        if (!(k > 0.0) || k > cfg.max_radius / 2.0)
            throw config_error("config: verify.k_values entries must lie in (0, R/2]");
    if (!(cfg.decay_window_lo < cfg.decay_window_hi) ||
        cfg.decay_window_hi > 0.9 * cfg.max_radius)
        throw config_error("config: verify.decay_window must be increasing and end below 0.9 R");
    if (cfg.moser_steps < 1) throw config_error("config: verify.moser_steps must be >= 1");
    if (cfg.degiorgi_levels < 1) throw config_error("config: verify.degiorgi_levels must be >= 1");
    const double p_star = sobolev_exponent(cfg.dimension, cfg.p);
    if (!(cfg.r_exp > cfg.p && cfg.r_exp < p_star))
        throw config_error("config: verify.r_exp must lie in (p, p*)");
    return cfg;
}

ProblemParams RunConfig::problem() const {
    try {
        return ProblemParams::make(dimension, p, alpha, NonlinearitySpec::power(q));
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
}

GridPtr RunConfig::make_grid() const { return build_grid(max_radius, node_count, dimension, scheme); }

}  // namespace chq
