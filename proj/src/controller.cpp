#include "scorelife/controller.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "scorelife/faber_schauder.hpp"
#include "scorelife/parallel.hpp"
#include "scorelife/rollout.hpp"
#include "scorelife/transform.hpp"

namespace scorelife {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Episode {
    const EnvModel& env;
    AliveFn alive;
    EpisodeResult result;
    State x;

    Episode(const EnvModel& e, const State& x0, const AliveFn& a, std::string method, std::uint64_t seed)
        : env(e), alive(a ? a : default_alive(e)), x(x0) {
        result.method = std::move(method);
        result.seed = seed;
        result.trajectory.states.push_back(x0);
    }

    bool running(std::size_t cap) const { return result.steps < cap && alive(x); }

    void apply(unsigned a, std::size_t replan, double fit_ms, double opt_ms) {
        const double c = env.stage_cost(x, a);
        x = env.next(x, a);
        auto& tr = result.trajectory;
        tr.actions.push_back(make_code(a, env.num_actions()));
        tr.costs.push_back(c);
        tr.states.push_back(x);
        tr.cumulative_reward -= c;
        result.cum_reward = tr.cumulative_reward;
        result.replan_id.push_back(replan);
        result.fit_ms.push_back(fit_ms);
        result.opt_ms.push_back(opt_ms);
        ++result.steps;
    }

    EpisodeResult finish() {
        result.trajectory.terminated = !alive(x);
        return std::move(result);
    }
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t k) { return seed * 100000 + k; }

}  // namespace

AliveFn default_alive(const EnvModel& env) {
    if (env.name() == "cartpole")
        return [](const State& s) { return cartpole_valid(CartpoleState::from_state(s)); };
    return [&env](const State& s) { return !env.is_terminal(s); };
}

EpisodeResult run_exact(const EnvModel& env, const State& x0, const ControlConfig& cfg, const AliveFn& alive) {
    if (cfg.prefix < 1) throw std::invalid_argument("prefix length must be at least 1");
    cfg.opt.validate();
    const std::size_t horizon = cfg.horizon ? cfg.horizon : default_horizon(env.gamma(), env.g_max());
    const unsigned m = env.num_actions();
    Episode ep(env, x0, alive, "exact", cfg.seed);

    for (std::size_t r = 0; ep.running(cfg.episode_cap); ++r) {
        OptimizerConfig opt = cfg.opt;
        opt.seed = mix(cfg.seed, r);
        ep.result.plan_seeds.push_back(opt.seed);
        double fit_ms = 0.0, opt_ms = 0.0;
        LifeValue plan(m, std::vector<std::uint8_t>(cfg.prefix, 0));
        try {
            auto t0 = Clock::now();
            const TruncatedEvaluator evaluator(env, ep.x, horizon);
            const FSRep rep = fit_fs(evaluator, ep.x, cfg.fs_order);
            fit_ms = ms_since(t0);
            t0 = Clock::now();
            const MultistartResult best = multistart_min(rep, opt);
            opt_ms = ms_since(t0);
            plan = LifeValue::from_real(best.l, m, cfg.prefix);
        } catch (const std::exception& e) {
            ep.result.events.push_back("replan " + std::to_string(r) + ": " + e.what() + "; using action 0");
        }
        ep.result.plans.push_back(plan);
        ++ep.result.replans;
        const auto codes = decode_prefix(plan, cfg.prefix).codes;
        for (std::size_t k = 0; k < codes.size() && ep.running(cfg.episode_cap); ++k)
            ep.apply(codes[k].index, r, k == 0 ? fit_ms : 0.0, k == 0 ? opt_ms : 0.0);
    }
    return ep.finish();
}

EpisodeResult run_approx(const EnvModel& env, const State& x0, const ControlConfig& cfg, const AliveFn& alive) {
    const std::size_t horizon = cfg.horizon ? cfg.horizon : default_horizon(env.gamma(), env.g_max());
    const unsigned m = env.num_actions();
    Episode ep(env, x0, alive, "approx", cfg.seed);

    for (std::size_t t = 0; ep.running(cfg.episode_cap); ++t) {
        const auto samples = sample_life_values(m, cfg.poly.n_samples, mix(cfg.seed, t),
                                                std::max(cfg.poly.sample_depth, horizon + 2));
        std::vector<double> l(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) l[i] = samples[i].value();

        auto t0 = Clock::now();
        double fit_ms = 0.0, opt_ms = 0.0;
        unsigned action = 0;
        try {
            std::vector<PolyRep> reps;
            // The transform path evaluates every successor through the current
            // state's evaluator with one extra step of horizon.
            const TruncatedEvaluator here(env, ep.x, horizon + 1);
            for (unsigned a = 0; a < m; ++a) {
                const State nx = env.next(ep.x, a);
                std::vector<double> y(samples.size());
                if (cfg.transform_successors) {
                    const std::vector<ActionCode> first{make_code(a, m)};
                    const auto p = params_from_trajectory(rollout(env, ep.x, first), env.gamma(), m);
                    parallel_for(samples.size(),
                                 [&](std::size_t i) { y[i] = apply_transform(here, p, env.gamma(), samples[i]); });
                } else {
                    const TruncatedEvaluator evaluator(env, nx, horizon);
                    parallel_for(samples.size(), [&](std::size_t i) { y[i] = evaluator.at(samples[i]); });
                }
                reps.push_back(fit_poly(l, y, cfg.poly.degree, m, nx));
            }
            fit_ms = ms_since(t0);
            t0 = Clock::now();
            action = bellman_action(env, ep.x, reps).index;
            opt_ms = ms_since(t0);
        } catch (const FitError& e) {
            ep.result.events.push_back("step " + std::to_string(t) + ": " + e.what() + "; grid argmin fallback");
            fit_ms = ms_since(t0);
            t0 = Clock::now();
            double best_q = std::numeric_limits<double>::infinity();
            for (unsigned a = 0; a < m; ++a) {
                const TruncatedEvaluator evaluator(env, env.next(ep.x, a), horizon);
                const double q = env.stage_cost(ep.x, a) + env.gamma() * grid_argmin(evaluator, cfg.fallback_depth).value;
                if (q < best_q) best_q = q, action = a;
            }
            opt_ms = ms_since(t0);
        }
        ++ep.result.replans;
        ep.apply(action, t, fit_ms, opt_ms);
    }
    return ep.finish();
}

State sample_initial_state(std::uint64_t seed, std::size_t dim, double box) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-box, box);
    State x(dim);
    for (auto& v : x) v = u(rng);
    return x;
}

Comparison compare_methods(const EnvModel& env, const std::vector<State>& x0s, const ControlConfig& cfg,
                           const AliveFn& alive) {
    Comparison out;
    for (std::size_t k = 0; k < x0s.size(); ++k) {
        ControlConfig c = cfg;
        c.seed = cfg.seed + k;
        out.exact.push_back(run_exact(env, x0s[k], c, alive));
        out.approx.push_back(run_approx(env, x0s[k], c, alive));
    }
    return out;
}

void write_control_csv(std::ostream& out, const std::vector<EpisodeResult>& episodes, bool header) {
    if (header) out << "seed,method,t,action,stage_cost,cum_reward,replan_id,fit_ms,opt_ms\n";
    for (const auto& ep : episodes) {
        double cum = 0.0;
        for (std::size_t t = 0; t < ep.steps; ++t) {
            cum -= ep.trajectory.costs[t];
            out << ep.seed << ',' << ep.method << ',' << t << ',' << ep.trajectory.actions[t].index << ','
                << ep.trajectory.costs[t] << ',' << cum << ',' << ep.replan_id[t] << ',' << ep.fit_ms[t] << ','
                << ep.opt_ms[t] << '\n';
        }
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,x,xdot,theta,thetadot,action,stage_cost,cum_reward\n";
    double cum = 0.0;
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        const auto& s = traj.states[t];
        out << t;
        for (std::size_t d = 0; d < 4; ++d) {
            out << ',';
            if (d < s.size()) out << s[d];
        }
        if (t < traj.length()) {
            cum -= traj.costs[t];
            out << ',' << traj.actions[t].index << ',' << traj.costs[t] << ',' << cum << '\n';
        } else {
            out << ",,," << cum << '\n';
        }
    }
}

}  // namespace scorelife
