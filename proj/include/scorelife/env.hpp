#pragma once

// Deterministic environments: x_{k+1} = f(x_k, u_k), stage cost g(x_k, u_k),
// discount gamma.  States are plain coordinate vectors; finite environments
// store the state index as their single coordinate.

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scorelife/life_codec.hpp"

namespace scorelife {

using State = std::vector<double>;

class EnvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable environment description.  Terminal states are absorbing and
/// cost nothing, which keeps infinite-horizon sums of episodic costs finite.
class EnvModel {
public:
    using StepFn = std::function<State(const State&, unsigned)>;
    using CostFn = std::function<double(const State&, unsigned)>;
    using TerminalFn = std::function<bool(const State&)>;

    struct Spec {
        std::string name;
        unsigned num_actions = 2;
        double gamma = 0.5;
        double g_max = 1.0;  // bound on |g| over the region of interest
        std::size_t state_dim = 1;
        StepFn step;
        CostFn cost;
        TerminalFn terminal;                  // empty: never terminates
        std::optional<std::size_t> finite_states;  // states {0..n-1} when set
    };

    explicit EnvModel(Spec spec);

    const std::string& name() const noexcept { return spec_.name; }
    unsigned num_actions() const noexcept { return spec_.num_actions; }
    double gamma() const noexcept { return spec_.gamma; }
    double g_max() const noexcept { return spec_.g_max; }
    std::size_t state_dim() const noexcept { return spec_.state_dim; }
    std::optional<std::size_t> finite_states() const noexcept { return spec_.finite_states; }
    bool has_termination() const noexcept { return static_cast<bool>(spec_.terminal); }

    bool is_terminal(const State& x) const;
    /// f(x, u); a terminal state maps to itself.
    State next(const State& x, unsigned action) const;
    /// g(x, u); zero on terminal states.
    double stage_cost(const State& x, unsigned action) const;

    /// Copy with a different discount factor.
    EnvModel with_gamma(double gamma) const;

    /// Index of a finite-environment state; throws if not finite or out of range.
    std::size_t state_index(const State& x) const;
    State finite_state(std::size_t index) const;

private:
    void check_action(unsigned action) const;
    Spec spec_;
};

struct Trajectory {
    std::vector<State> states;  // |states| = |actions| + 1
    std::vector<ActionCode> actions;
    std::vector<double> costs;  // costs[i] = g(states[i], actions[i])
    double cumulative_reward = 0.0;  // -sum(costs)
    bool terminated = false;         // stopped early on a terminal state

    std::size_t length() const noexcept { return actions.size(); }
};

/// Applies the actions in order, stopping early once a terminal state is reached.
Trajectory rollout(const EnvModel& env, const State& x0, std::span<const ActionCode> actions);

// --- cartpole ---------------------------------------------------------------

struct CartpoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;

    State to_state() const { return {x, x_dot, theta, theta_dot}; }
    static CartpoleState from_state(const State& s);
};

/// Gym-compatible constants.
struct CartpoleParams {
    double gravity = 9.8;
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double half_length = 0.5;
    double force_mag = 10.0;
    double tau = 0.02;
    double x_threshold = 2.4;
    double theta_threshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
    int episode_cap = 500;
    // velocity box used only to declare G_max for the quadratic cost
    double x_dot_bound = 5.0;
    double theta_dot_bound = 5.0;
};

enum class CostKind { quadratic, reward };

CostKind parse_cost_kind(const std::string& s);
std::string to_string(CostKind kind);

/// One explicit-Euler step; action 0 pushes with -force_mag, action 1 with +force_mag.
CartpoleState cartpole_step(const CartpoleState& s, ActionCode u, const CartpoleParams& p = {});
bool cartpole_valid(const CartpoleState& s, const CartpoleParams& p = {});
/// x^T Q x with Q = diag(2, 1, 8, 1).
double quadratic_cost(const CartpoleState& s);
/// -1 while the episode is valid, 0 once terminated.
double reward_cost(const CartpoleState& s, const CartpoleParams& p = {});
double quadratic_cost_bound(const CartpoleParams& p);

/// The quadratic variant never terminates inside the model (a zero-cost
/// absorbing state would reward falling); the reward variant terminates.
EnvModel make_cartpole(CostKind cost, double gamma, const CartpoleParams& p = {});

// --- finite oracle environments ---------------------------------------------

/// States {0..n-1}; action 0: x -> x+1 mod n, action 1: x -> x+2 mod n; g(x,u) = x.
EnvModel cycle_mdp(std::size_t n_states, double gamma = 0.5);

/// Explicit finite MDP from successor and cost tables indexed [state][action].
EnvModel finite_mdp(std::vector<std::vector<std::size_t>> successors, std::vector<std::vector<double>> costs,
                    double gamma, std::string name = "finite");

/// Single fixed-point state with g == c for every action.
EnvModel constant_cost_env(double c, double gamma, unsigned num_actions = 2);

}  // namespace scorelife
