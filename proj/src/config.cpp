#include "scorelife/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "scorelife/rollout.hpp"

namespace scorelife {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto s = trim(v);
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto s = trim(v);
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    const auto s = trim(v);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty() && key == "state") return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
    return out;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

struct Field {
    std::string key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field number(std::string key, T ExperimentConfig::*m) {
    Field f{key, {}, {}};
    if constexpr (std::is_floating_point_v<T>) {
        f.set = [m, key](ExperimentConfig& c, const std::string& v) { c.*m = parse_double(key, v); };
        f.get = [m](const ExperimentConfig& c) { return fmt(c.*m); };
    } else if constexpr (std::is_same_v<T, bool>) {
        f.set = [m, key](ExperimentConfig& c, const std::string& v) { c.*m = parse_bool(key, v); };
        f.get = [m](const ExperimentConfig& c) { return std::string(c.*m ? "true" : "false"); };
    } else {
        f.set = [m, key](ExperimentConfig& c, const std::string& v) { c.*m = static_cast<T>(parse_uint(key, v)); };
        f.get = [m](const ExperimentConfig& c) { return std::to_string(c.*m); };
    }
    return f;
}

Field text(std::string key, std::string ExperimentConfig::*m) {
    return {key, [m](ExperimentConfig& c, const std::string& v) { c.*m = trim(v); },
            [m](const ExperimentConfig& c) { return c.*m; }};
}

template <class T>
Field cartpole(std::string key, T CartpoleParams::*m) {
    return {key,
            [m, key](ExperimentConfig& c, const std::string& v) {
                if constexpr (std::is_floating_point_v<T>) c.cartpole.*m = parse_double(key, v);
                else c.cartpole.*m = static_cast<T>(parse_uint(key, v));
            },
            [m](const ExperimentConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return fmt(c.cartpole.*m);
                else return std::to_string(c.cartpole.*m);
            }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back(text("env", &ExperimentConfig::env));
        f.push_back({"cost", [](ExperimentConfig& c, const std::string& v) {
                         try {
                             c.cost = parse_cost_kind(trim(v));
                         } catch (const std::exception& e) {
                             throw ConfigError(std::string("cost: ") + e.what());
                         }
                     },
                     [](const ExperimentConfig& c) { return to_string(c.cost); }});
        f.push_back(number("gamma", &ExperimentConfig::gamma));
        f.push_back({"gammas", [](ExperimentConfig& c, const std::string& v) { c.gammas = parse_list("gammas", v); },
                     [](const ExperimentConfig& c) { return fmt_list(c.gammas); }});
        f.push_back(number("cycle_states", &ExperimentConfig::cycle_states));
        f.push_back(number("constant_cost", &ExperimentConfig::constant_cost));
        f.push_back({"state", [](ExperimentConfig& c, const std::string& v) { c.state = parse_list("state", v); },
                     [](const ExperimentConfig& c) { return fmt_list(c.state); }});
        f.push_back(cartpole("gravity", &CartpoleParams::gravity));
        f.push_back(cartpole("cart_mass", &CartpoleParams::cart_mass));
        f.push_back(cartpole("pole_mass", &CartpoleParams::pole_mass));
        f.push_back(cartpole("half_length", &CartpoleParams::half_length));
        f.push_back(cartpole("force_mag", &CartpoleParams::force_mag));
        f.push_back(cartpole("tau", &CartpoleParams::tau));
        f.push_back(cartpole("x_threshold", &CartpoleParams::x_threshold));
        f.push_back(cartpole("theta_threshold", &CartpoleParams::theta_threshold));
        f.push_back(cartpole("x_dot_bound", &CartpoleParams::x_dot_bound));
        f.push_back(cartpole("theta_dot_bound", &CartpoleParams::theta_dot_bound));
        f.push_back(number("horizon", &ExperimentConfig::horizon));
        f.push_back(number("tail_tol", &ExperimentConfig::tail_tol));
        f.push_back(number("grid_depth", &ExperimentConfig::grid_depth));
        f.push_back(number("order", &ExperimentConfig::order));
        f.push_back(number("eta", &ExperimentConfig::eta));
        f.push_back(number("delta", &ExperimentConfig::delta));
        f.push_back(number("max_iters", &ExperimentConfig::max_iters));
        f.push_back(number("restarts", &ExperimentConfig::restarts));
        f.push_back(number("prescan_depth", &ExperimentConfig::prescan_depth));
        f.push_back(number("prefix", &ExperimentConfig::prefix));
        f.push_back(number("degree", &ExperimentConfig::degree));
        f.push_back(number("samples", &ExperimentConfig::samples));
        f.push_back(number("sample_depth", &ExperimentConfig::sample_depth));
        f.push_back(number("transform_successors", &ExperimentConfig::transform_successors));
        f.push_back(text("method", &ExperimentConfig::method));
        f.push_back(number("seeds", &ExperimentConfig::seeds));
        f.push_back(number("seed", &ExperimentConfig::seed));
        f.push_back(number("episode_cap", &ExperimentConfig::episode_cap));
        f.push_back(number("init_box", &ExperimentConfig::init_box));
        f.push_back(number("transform_samples", &ExperimentConfig::transform_samples));
        f.push_back(number("psi_bound", &ExperimentConfig::psi_bound));
        f.push_back(number("plot_samples", &ExperimentConfig::plot_samples));
        f.push_back(text("plot_sampling", &ExperimentConfig::plot_sampling));
        f.push_back(number("svg", &ExperimentConfig::svg));
        f.push_back(text("out", &ExperimentConfig::out));
        f.push_back(text("policy", &ExperimentConfig::policy));
        f.push_back(text("base_rep", &ExperimentConfig::base_rep));
        f.push_back(text("mdp", &ExperimentConfig::mdp));
        return f;
    }();
    return table;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    const auto& f = fields();
    auto it = std::find_if(f.begin(), f.end(), [&](const Field& x) { return x.key == key; });
    if (it == f.end()) throw ConfigError("unknown config key '" + key + "'");
    it->set(*this, value);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
    return out;
}

const std::vector<std::string>& ExperimentConfig::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> out;
        for (const auto& f : fields()) out.push_back(f.key);
        return out;
    }();
    return k;
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(env == "cartpole" || env == "cycle" || env == "constant" || env == "finite",
            "env must be cartpole, cycle, constant or finite");
    if (env == "finite") require(!mdp.empty(), "env = finite needs an mdp file");
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0,1)");
    for (double g : gammas) require(g > 0.0 && g < 1.0, "gammas must lie in (0,1)");
    require(cycle_states >= 2, "cycle_states must be at least 2");
    if (!state.empty()) {
        if (env == "cartpole") require(state.size() == 4, "cartpole state needs 4 coordinates");
        else require(state.size() == 1, env + " state needs 1 coordinate");
    }
    require(tail_tol > 0.0, "tail_tol must be positive");
    require(grid_depth >= 1 && grid_depth <= 24, "grid_depth must lie in [1,24]");
    require(order <= kMaxFsOrder, "order must not exceed " + std::to_string(kMaxFsOrder));
    require(eta > 0.0 && delta > 0.0, "eta and delta must be positive");
    require(max_iters >= 1 && restarts >= 1, "max_iters and restarts must be at least 1");
    require(prescan_depth <= 20, "prescan_depth must not exceed 20");
    require(prefix >= 1, "prefix must be at least 1");
    require(degree >= 1, "degree must be at least 1");
    require(samples >= degree + 1, "samples must be at least degree + 1");
    require(method == "approx" || method == "exact", "method must be approx or exact");
    require(init_box >= 0.0, "init_box must be non-negative");
    require(transform_samples >= 3, "transform_samples must be at least 3");
    require(psi_bound > 0.0, "psi_bound must be positive");
    require(plot_samples >= 2, "plot_samples must be at least 2");
    require(plot_sampling == "uniform" || plot_sampling == "dyadic", "plot_sampling must be uniform or dyadic");
}

EnvModel ExperimentConfig::make_env() const {
    if (env == "cartpole") return make_cartpole(cost, gamma, cartpole);
    if (env == "cycle") return cycle_mdp(cycle_states, gamma);
    if (env == "constant") return constant_cost_env(constant_cost, gamma);
    if (env == "finite") return load_finite_mdp(mdp, gamma);
    throw ConfigError("unknown env '" + env + "'");
}

std::size_t ExperimentConfig::resolved_horizon(const EnvModel& e) const {
    return horizon ? horizon : default_horizon(e.gamma(), e.g_max(), tail_tol);
}

State ExperimentConfig::resolved_state(const EnvModel& e) const {
    return state.empty() ? State(e.state_dim(), 0.0) : state;
}

OptimizerConfig ExperimentConfig::optimizer() const {
    OptimizerConfig c;
    c.eta = eta;
    c.delta = delta;
    c.max_iters = max_iters;
    c.restarts = restarts;
    c.prescan_depth = prescan_depth;
    c.seed = seed;
    return c;
}

PolyFitConfig ExperimentConfig::poly() const {
    PolyFitConfig c;
    c.degree = degree;
    c.n_samples = samples;
    c.seed = seed;
    c.sample_depth = sample_depth;
    return c;
}

EnvModel load_finite_mdp(const std::string& path, double gamma) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mdp file " + path);
    std::vector<std::vector<std::size_t>> next;
    std::vector<std::vector<double>> cost;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        const std::string where = path + ":" + std::to_string(lineno);
        if (cells.size() != 4) throw ConfigError(where + ": expected state,action,next,cost");
        const auto x = parse_uint(where, cells[0]);
        const auto a = parse_uint(where, cells[1]);
        const auto nx = parse_uint(where, cells[2]);
        const double c = parse_double(where, cells[3]);
        if (next.size() <= x) next.resize(x + 1), cost.resize(x + 1);
        if (next[x].size() <= a) next[x].resize(a + 1, SIZE_MAX), cost[x].resize(a + 1, 0.0);
        next[x][a] = nx;
        cost[x][a] = c;
    }
    if (next.empty()) throw ConfigError(path + ": no transitions");
    for (std::size_t x = 0; x < next.size(); ++x) {
        if (next[x].size() != next[0].size())
            throw ConfigError(path + ": state " + std::to_string(x) + " has a different action count");
        for (std::size_t a = 0; a < next[x].size(); ++a)
            if (next[x][a] == SIZE_MAX || next[x][a] >= next.size())
                throw ConfigError(path + ": missing or invalid transition for state " + std::to_string(x) +
                                  ", action " + std::to_string(a));
    }
    try {
        return finite_mdp(std::move(next), std::move(cost), gamma, "finite");
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        try {
            cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
    for (const auto& [k, v] : cfg.entries()) out << k << " = " << v << '\n';
}

}  // namespace scorelife
