#pragma once

// Closed-loop drivers.  The exact method fits a Faber-Schauder rep at the
// current state, minimises it, executes the first P decoded actions and
// replans.  The approximate method picks every action by one-step Bellman
// selection over freshly fitted polynomial reps of the successors.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "scorelife/env.hpp"
#include "scorelife/fractal_opt.hpp"
#include "scorelife/poly_approx.hpp"

namespace scorelife {

struct ControlConfig {
    std::size_t episode_cap = 500;
    std::size_t horizon = 0;  // 0: default_horizon for the environment
    std::uint64_t seed = 0;

    unsigned fs_order = 10;
    OptimizerConfig opt;
    std::size_t prefix = 10;

    PolyFitConfig poly;
    bool transform_successors = false;  // successor samples via the transform of the current state's rollouts
    unsigned fallback_depth = 10;       // grid argmin when a polynomial fit fails
};

using AliveFn = std::function<bool(const State&)>;

struct EpisodeResult {
    std::string method;
    std::uint64_t seed = 0;
    Trajectory trajectory;
    std::size_t steps = 0;  // actions applied from alive states
    double cum_reward = 0.0;  // -sum of stage costs
    std::size_t replans = 0;
    std::vector<std::size_t> replan_id;  // per step
    std::vector<double> fit_ms;          // per step
    std::vector<double> opt_ms;          // per step
    std::vector<LifeValue> plans;        // exact method: the minimiser of each replan
    std::vector<std::uint64_t> plan_seeds;
    std::vector<std::string> events;     // fallbacks and failures
};

/// Default liveness: cartpole episode validity for cartpole models, otherwise
/// "not terminal".
AliveFn default_alive(const EnvModel& env);

EpisodeResult run_exact(const EnvModel& env, const State& x0, const ControlConfig& cfg, const AliveFn& alive = {});
EpisodeResult run_approx(const EnvModel& env, const State& x0, const ControlConfig& cfg, const AliveFn& alive = {});

/// Uniform in [-box, box]^dim from the seed.
State sample_initial_state(std::uint64_t seed, std::size_t dim, double box);

struct Comparison {
    std::vector<EpisodeResult> exact;
    std::vector<EpisodeResult> approx;
};

/// Both methods from every initial state; episode k uses seed cfg.seed + k.
Comparison compare_methods(const EnvModel& env, const std::vector<State>& x0s, const ControlConfig& cfg,
                           const AliveFn& alive = {});

/// seed, method, t, action, stage_cost, cum_reward, replan_id, fit_ms, opt_ms
void write_control_csv(std::ostream& out, const std::vector<EpisodeResult>& episodes, bool header = true);
/// t, x, xdot, theta, thetadot, action, stage_cost, cum_reward
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace scorelife
