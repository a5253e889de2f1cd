#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scorelife/config.hpp"
#include "scorelife/controller.hpp"
#include "scorelife/faber_schauder.hpp"
#include "scorelife/fractal_opt.hpp"
#include "scorelife/plot.hpp"
#include "scorelife/policy_life.hpp"
#include "scorelife/poly_approx.hpp"
#include "scorelife/rollout.hpp"
#include "scorelife/transform.hpp"
#include "scorelife/verify.hpp"

namespace fs = std::filesystem;
using namespace scorelife;

namespace {

enum Exit { ok = 0, io_failure = 1, config_failure = 2, numerical_failure = 3, verification_failure = 4 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VerificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    out.precision(17);
    return out;
}

fs::path prepare(const ExperimentConfig& cfg, const std::string& command) {
    const fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + cfg.out);
    auto out = open_out(dir / (command + "_config.txt"));
    out << "# resolved configuration for " << command << '\n';
    write_config(out, cfg);
    return dir;
}

std::string gamma_tag(double g) {
    std::ostringstream s;
    s << g;
    return s.str();
}

ControlConfig control_config(const ExperimentConfig& cfg, const EnvModel& env) {
    ControlConfig c;
    c.episode_cap = cfg.episode_cap;
    c.horizon = cfg.resolved_horizon(env);
    c.seed = cfg.seed;
    c.fs_order = cfg.order;
    c.opt = cfg.optimizer();
    c.prefix = cfg.prefix;
    c.poly = cfg.poly();
    c.transform_successors = cfg.transform_successors;
    c.fallback_depth = cfg.grid_depth;
    return c;
}

AliveFn alive_fn(const ExperimentConfig& cfg, const EnvModel& env) {
    if (cfg.env == "cartpole") {
        const auto params = cfg.cartpole;
        return [params](const State& s) { return cartpole_valid(CartpoleState::from_state(s), params); };
    }
    return default_alive(env);
}

std::vector<State> initial_states(const ExperimentConfig& cfg, const EnvModel& env) {
    std::vector<State> xs;
    for (std::size_t k = 0; k < cfg.seeds; ++k) {
        if (cfg.env == "cartpole" && cfg.state.empty())
            xs.push_back(sample_initial_state(cfg.seed + k, 4, cfg.init_box));
        else
            xs.push_back(cfg.resolved_state(env));
    }
    return xs;
}

nlohmann::json episode_summary(const EpisodeResult& ep) {
    return {{"seed", ep.seed},          {"method", ep.method},
            {"steps", ep.steps},        {"cum_reward", ep.cum_reward},
            {"replans", ep.replans},    {"terminated", ep.trajectory.terminated},
            {"plan_seeds", ep.plan_seeds}, {"events", ep.events}};
}

std::unique_ptr<ScoreLifeRep> load_rep(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open representation " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (j.contains("alpha0")) return std::make_unique<FSRep>(fs_from_json(j));
    if (j.contains("coeffs")) return std::make_unique<PolyRep>(poly_from_json(j));
    throw ConfigError(path + ": neither a Faber-Schauder nor a polynomial representation");
}

int cmd_plot_slf(const ExperimentConfig& cfg) {
    const auto dir = prepare(cfg, "plot-slf");
    const auto env0 = cfg.make_env();
    const auto x = cfg.resolved_state(env0);
    std::vector<Curve> curves;
    nlohmann::json summary = nlohmann::json::array();
    const auto sampling = parse_sampling(cfg.plot_sampling);
    const std::size_t count =
        sampling == Sampling::dyadic ? static_cast<std::size_t>(std::pow(env0.num_actions(), cfg.grid_depth))
                                     : cfg.plot_samples;
    for (double g : cfg.gammas) {
        const auto env = env0.with_gamma(g);
        const TruncatedEvaluator e(env, x, cfg.resolved_horizon(env));
        auto c = sample_curve(e, count, sampling, cfg.seed, "gamma = " + gamma_tag(g));
        auto out = open_out(dir / ("slf_gamma_" + gamma_tag(g) + ".csv"));
        write_curve_csv(out, c);
        const auto [lo, hi] = std::minmax_element(c.s.begin(), c.s.end());
        summary.push_back({{"gamma", g}, {"total_variation", total_variation(c)}, {"min", *lo}, {"max", *hi},
                           {"horizon", e.horizon()}, {"samples", c.l.size()}});
        curves.push_back(std::move(c));
    }
    if (cfg.svg) {
        auto out = open_out(dir / "slf.svg");
        write_svg(out, curves, "Score-life function, " + env0.name());
    }
    open_out(dir / "plot-slf_summary.json") << summary.dump(2) << '\n';
    std::cout << summary.dump(2) << '\n';
    return ok;
}

int cmd_fit_fs(const ExperimentConfig& cfg) {
    const auto dir = prepare(cfg, "fit-fs");
    const auto env = cfg.make_env();
    const auto x = cfg.resolved_state(env);
    const TruncatedEvaluator e(env, x, cfg.resolved_horizon(env));
    const auto rep = fit_fs(e, x, cfg.order);
    nlohmann::json j = rep;
    open_out(dir / "fs_rep.json") << j.dump(2) << '\n';
    const auto best = multistart_min(rep, cfg.optimizer());
    auto out = open_out(dir / "fs_min.csv");
    out << "l_star,value,stop_reason,restarts_used\n"
        << best.l << ',' << best.value << ',' << to_string(best.reason) << ',' << best.restarts_used << '\n';
    std::cout << "coefficients " << rep.coefficient_count() << ", min " << best.value << " at l = " << best.l << " ("
              << to_string(best.reason) << ")\n";
    return ok;
}

int cmd_fit_poly(const ExperimentConfig& cfg) {
    const auto dir = prepare(cfg, "fit-poly");
    const auto env = cfg.make_env();
    const auto x = cfg.resolved_state(env);
    const TruncatedEvaluator e(env, x, cfg.resolved_horizon(env));
    const auto rep = fit_poly(e, x, cfg.poly());
    nlohmann::json j = rep;
    j["min"] = poly_min(rep).value;
    open_out(dir / "poly_rep.json") << j.dump(2) << '\n';
    std::cout << j.dump(2) << '\n';
    return ok;
}

int cmd_fit_transform(const ExperimentConfig& cfg) {
    if (cfg.base_rep.empty()) throw ConfigError("fit-transform needs base_rep (--base)");
    const auto dir = prepare(cfg, "fit-transform");
    const auto base = load_rep(cfg.base_rep);
    const auto env = cfg.make_env();
    if (base->base() != env.num_actions()) throw ConfigError("base representation uses a different action count");
    const TruncatedEvaluator target(env, cfg.resolved_state(env), cfg.resolved_horizon(env));
    TransformFitConfig tc;
    tc.n_samples = cfg.transform_samples;
    tc.seed = cfg.seed;
    tc.psi_bound = cfg.psi_bound;
    const auto fit = fit_params(*base, target, env.gamma(), tc);
    nlohmann::json j = fit;
    open_out(dir / "transform.json") << j.dump(2) << '\n';
    std::cout << j.dump(2) << '\n';
    return ok;
}

int cmd_policy_life(const ExperimentConfig& cfg) {
    if (cfg.policy.empty()) throw ConfigError("policy-life needs a policy file (--policy)");
    const auto env = cfg.make_env();
    if (!env.finite_states()) throw ConfigError("policy-life needs a finite environment");
    std::ifstream in(cfg.policy);
    if (!in) throw ConfigError("cannot open policy file " + cfg.policy);
    std::map<std::size_t, unsigned> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
        std::size_t state = 0;
        unsigned code = 0;
        char comma = 0;
        std::istringstream ss(line);
        if (!(ss >> state >> comma >> code) || comma != ',') throw ConfigError("bad policy row '" + line + "'");
        rows[state] = code;
    }
    const std::size_t n = *env.finite_states();
    std::vector<ActionCode> policy;
    for (std::size_t s = 0; s < n; ++s) {
        auto it = rows.find(s);
        if (it == rows.end()) throw ConfigError("policy has no action for state " + std::to_string(s));
        policy.push_back(make_code(it->second, env.num_actions()));
    }
    const auto dir = prepare(cfg, "policy-life");
    const auto sys = build_system(env, policy);
    const auto vals = solve(sys);
    auto out = open_out(dir / "policy_life.csv");
    out << "state_index,life_value\n";
    for (std::size_t s = 0; s < n; ++s) out << s << ',' << vals.values[s] << '\n';
    std::vector<std::size_t> boundary;
    for (std::size_t s = 0; s < n; ++s)
        if (vals.boundary[s]) boundary.push_back(s);
    nlohmann::json j{{"residual", vals.residual}, {"iterative", vals.iterative}, {"boundary_states", boundary},
                     {"values", vals.values}};
    open_out(dir / "policy_life.json") << j.dump(2) << '\n';
    std::cout << j.dump(2) << '\n';
    return ok;
}

int cmd_control(const ExperimentConfig& cfg) {
    const auto dir = prepare(cfg, "control");
    const auto env = cfg.make_env();
    const auto base = control_config(cfg, env);
    const auto alive = alive_fn(cfg, env);
    const auto xs = initial_states(cfg, env);
    std::vector<EpisodeResult> episodes;
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t k = 0; k < xs.size(); ++k) {
        auto c = base;
        c.seed = cfg.seed + k;
        auto ep = cfg.method == "exact" ? run_exact(env, xs[k], c, alive) : run_approx(env, xs[k], c, alive);
        auto traj = open_out(dir / ("trajectory_" + ep.method + "_" + std::to_string(ep.seed) + ".csv"));
        write_trajectory_csv(traj, ep.trajectory);
        summary.push_back(episode_summary(ep));
        std::cout << "seed " << ep.seed << ": " << ep.steps << " steps, cumulative reward " << ep.cum_reward << '\n';
        episodes.push_back(std::move(ep));
    }
    auto out = open_out(dir / "control.csv");
    write_control_csv(out, episodes);
    open_out(dir / "control_summary.json") << summary.dump(2) << '\n';
    return ok;
}

int cmd_compare(const ExperimentConfig& cfg) {
    const auto dir = prepare(cfg, "compare");
    const auto env = cfg.make_env();
    const auto cmp = compare_methods(env, initial_states(cfg, env), control_config(cfg, env), alive_fn(cfg, env));
    auto out = open_out(dir / "compare.csv");
    write_control_csv(out, cmp.exact);
    write_control_csv(out, cmp.approx, false);
    nlohmann::json summary = nlohmann::json::array();
    std::size_t approx_at_least = 0;
    for (std::size_t k = 0; k < cmp.exact.size(); ++k) {
        summary.push_back({{"exact", episode_summary(cmp.exact[k])}, {"approx", episode_summary(cmp.approx[k])}});
        approx_at_least += cmp.approx[k].steps >= cmp.exact[k].steps ? 1 : 0;
        std::cout << "seed " << cmp.exact[k].seed << ": exact " << cmp.exact[k].steps << " steps, approx "
                  << cmp.approx[k].steps << " steps\n";
    }
    open_out(dir / "compare_summary.json")
        << nlohmann::json{{"episodes", summary}, {"approx_at_least_exact", approx_at_least}}.dump(2) << '\n';
    return ok;
}

int cmd_verify(const ExperimentConfig& cfg) {
    const auto dir = prepare(cfg, "verify");
    VerifyOptions o;
    o.seed = cfg.seed;
    const auto checks = run_verification(o);
    const auto report = report_json(checks);
    open_out(dir / "verify.json") << report.dump(2) << '\n';
    for (const auto& c : checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured " << c.measured << "  threshold "
                  << c.threshold << "  " << c.detail << '\n';
    if (!all_passed(checks)) throw VerificationFailed("verification failed");
    return ok;
}

std::string flag_name(const std::string& key) {
    std::string f = key;
    for (auto& ch : f)
        if (ch == '_') ch = '-';
    return "--" + f;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Score-life programming: encode action sequences as life values and control with them"};
    app.require_subcommand(1);

    struct Command {
        std::string name;
        std::string help;
        int (*run)(const ExperimentConfig&);
    };
    const std::vector<Command> commands{
        {"plot-slf", "sample S(l, x) over l for each gamma; CSV and SVG", cmd_plot_slf},
        {"fit-fs", "Faber-Schauder representation and its multistart minimum", cmd_fit_fs},
        {"fit-poly", "polynomial representation and its minimum", cmd_fit_poly},
        {"fit-transform", "regress (phi, psi, N) relating a base representation to a state", cmd_fit_transform},
        {"policy-life", "life values of a stationary policy on a finite environment", cmd_policy_life},
        {"control", "closed-loop episodes with the exact or approximate method", cmd_control},
        {"compare", "both control methods on the same initial states", cmd_compare},
        {"verify", "self-check of the core identities; JSON report", cmd_verify},
    };

    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> overrides;
    for (const auto& key : ExperimentConfig::keys()) overrides[key];

    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("-c,--config", config_path, "key = value configuration file");
        sub->add_option("--set", sets, "key=value override (repeatable)");
        for (const auto& key : ExperimentConfig::keys()) {
            std::string names = flag_name(key);
            if (key == "base_rep") names += ",--base";
            sub->add_option(names, overrides[key], "config key " + key);
        }
        subs.emplace_back(sub, &c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_failure;
    }

    const Command* chosen = nullptr;
    CLI::App* sub = nullptr;
    for (auto& [s, c] : subs)
        if (s->parsed()) sub = s, chosen = c;

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const auto& key : ExperimentConfig::keys())
            if (sub->count(flag_name(key)) > 0) cfg.set(key, overrides[key]);
        if (chosen->name == "plot-slf" && sub->count("--gamma") > 0 && sub->count("--gammas") == 0)
            cfg.gammas = {cfg.gamma};
        cfg.validate();
        if (chosen->name != "control" && chosen->name != "compare" && cfg.state.empty())
            cfg.state = cfg.resolved_state(cfg.make_env());
        return chosen->run(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    } catch (const CodecError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_failure;
    } catch (const VerificationFailed& e) {
        std::cerr << e.what() << '\n';
        return verification_failure;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    }
}
