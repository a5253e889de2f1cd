#include "scorelife/env.hpp"

#include <algorithm>
#include <cmath>

namespace scorelife {

EnvModel::EnvModel(Spec spec) : spec_(std::move(spec)) {
    bits_per_digit(spec_.num_actions);
    if (!(spec_.gamma > 0.0 && spec_.gamma < 1.0)) throw EnvError("discount must lie in (0,1)");
    if (!spec_.step || !spec_.cost) throw EnvError("environment needs step and cost functions");
    if (!(spec_.g_max >= 0.0)) throw EnvError("G_max must be nonnegative");
}

void EnvModel::check_action(unsigned action) const {
    if (action >= spec_.num_actions)
        throw EnvError("action code " + std::to_string(action) + " invalid for " + spec_.name);
}

bool EnvModel::is_terminal(const State& x) const { return spec_.terminal && spec_.terminal(x); }

State EnvModel::next(const State& x, unsigned action) const {
    check_action(action);
    if (is_terminal(x)) return x;
    return spec_.step(x, action);
}

double EnvModel::stage_cost(const State& x, unsigned action) const {
    check_action(action);
    if (is_terminal(x)) return 0.0;
    return spec_.cost(x, action);
}

EnvModel EnvModel::with_gamma(double gamma) const {
    auto spec = spec_;
    spec.gamma = gamma;
    return EnvModel(std::move(spec));
}

std::size_t EnvModel::state_index(const State& x) const {
    if (!spec_.finite_states) throw EnvError(spec_.name + " is not a finite environment");
    if (x.size() != 1 || x[0] < 0.0 || x[0] != std::floor(x[0]) ||
        static_cast<std::size_t>(x[0]) >= *spec_.finite_states)
        throw EnvError("not a valid state of " + spec_.name);
    return static_cast<std::size_t>(x[0]);
}

State EnvModel::finite_state(std::size_t index) const {
    if (!spec_.finite_states || index >= *spec_.finite_states) throw EnvError("state index out of range");
    return {static_cast<double>(index)};
}

Trajectory rollout(const EnvModel& env, const State& x0, std::span<const ActionCode> actions) {
    Trajectory t;
    t.states.reserve(actions.size() + 1);
    t.states.push_back(x0);
    for (const auto& a : actions) {
        if (a.base != env.num_actions()) throw EnvError("action code base does not match environment");
        const State& x = t.states.back();
        if (env.is_terminal(x)) {
            t.terminated = true;
            break;
        }
        const double c = env.stage_cost(x, a.index);
        State nx = env.next(x, a.index);
        t.actions.push_back(a);
        t.costs.push_back(c);
        t.cumulative_reward -= c;
        t.states.push_back(std::move(nx));
    }
    if (!t.terminated && env.is_terminal(t.states.back())) t.terminated = true;
    return t;
}

// --- cartpole ---------------------------------------------------------------

CartpoleState CartpoleState::from_state(const State& s) {
    if (s.size() != 4) throw EnvError("cartpole state needs 4 coordinates");
    return {s[0], s[1], s[2], s[3]};
}

CostKind parse_cost_kind(const std::string& s) {
    if (s == "quadratic") return CostKind::quadratic;
    if (s == "reward") return CostKind::reward;
    throw EnvError("unknown cost kind '" + s + "'");
}

std::string to_string(CostKind kind) { return kind == CostKind::quadratic ? "quadratic" : "reward"; }

CartpoleState cartpole_step(const CartpoleState& s, ActionCode u, const CartpoleParams& p) {
    if (!std::isfinite(s.x) || !std::isfinite(s.x_dot) || !std::isfinite(s.theta) || !std::isfinite(s.theta_dot))
        throw EnvError("non-finite cartpole state");
    if (u.base != 2 || u.index > 1) throw EnvError("cartpole takes action codes 0 or 1");
    const double force = u.index == 1 ? p.force_mag : -p.force_mag;
    const double total_mass = p.cart_mass + p.pole_mass;
    const double polemass_length = p.pole_mass * p.half_length;
    const double cos_t = std::cos(s.theta);
    const double sin_t = std::sin(s.theta);

    const double temp = (force + polemass_length * s.theta_dot * s.theta_dot * sin_t) / total_mass;
    const double theta_acc = (p.gravity * sin_t - cos_t * temp) /
                             (p.half_length * (4.0 / 3.0 - p.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

    return {s.x + p.tau * s.x_dot, s.x_dot + p.tau * x_acc, s.theta + p.tau * s.theta_dot,
            s.theta_dot + p.tau * theta_acc};
}

bool cartpole_valid(const CartpoleState& s, const CartpoleParams& p) {
    return std::abs(s.x) <= p.x_threshold && std::abs(s.theta) <= p.theta_threshold;
}

double quadratic_cost(const CartpoleState& s) {
    return 2.0 * s.x * s.x + s.x_dot * s.x_dot + 8.0 * s.theta * s.theta + s.theta_dot * s.theta_dot;
}

double reward_cost(const CartpoleState& s, const CartpoleParams& p) { return cartpole_valid(s, p) ? -1.0 : 0.0; }

double quadratic_cost_bound(const CartpoleParams& p) {
    return quadratic_cost({p.x_threshold, p.x_dot_bound, p.theta_threshold, p.theta_dot_bound});
}

EnvModel make_cartpole(CostKind cost, double gamma, const CartpoleParams& p) {
    EnvModel::Spec spec;
    spec.name = "cartpole";
    spec.num_actions = 2;
    spec.gamma = gamma;
    spec.state_dim = 4;
    spec.step = [p](const State& x, unsigned a) {
        return cartpole_step(CartpoleState::from_state(x), {a, 2}, p).to_state();
    };
    if (cost == CostKind::quadratic) {
        spec.g_max = quadratic_cost_bound(p);
        spec.cost = [](const State& x, unsigned) { return quadratic_cost(CartpoleState::from_state(x)); };
    } else {
        spec.g_max = 1.0;
        spec.cost = [p](const State& x, unsigned) { return reward_cost(CartpoleState::from_state(x), p); };
        spec.terminal = [p](const State& x) { return !cartpole_valid(CartpoleState::from_state(x), p); };
    }
    return EnvModel(std::move(spec));
}

// --- finite oracle environments ---------------------------------------------

EnvModel cycle_mdp(std::size_t n_states, double gamma) {
    if (n_states < 2) throw EnvError("cycle_mdp needs at least 2 states");
    EnvModel::Spec spec;
    spec.name = "cycle";
    spec.num_actions = 2;
    spec.gamma = gamma;
    spec.g_max = static_cast<double>(n_states - 1);
    spec.finite_states = n_states;
    const auto n = static_cast<double>(n_states);
    spec.step = [n](const State& x, unsigned a) { return State{std::fmod(x[0] + (a == 0 ? 1.0 : 2.0), n)}; };
    spec.cost = [](const State& x, unsigned) { return x[0]; };
    return EnvModel(std::move(spec));
}

EnvModel finite_mdp(std::vector<std::vector<std::size_t>> successors, std::vector<std::vector<double>> costs,
                    double gamma, std::string name) {
    const std::size_t n = successors.size();
    if (n == 0 || costs.size() != n) throw EnvError("finite_mdp: table sizes disagree");
    const std::size_t m = successors[0].size();
    double g_max = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (successors[s].size() != m || costs[s].size() != m) throw EnvError("finite_mdp: ragged tables");
        for (std::size_t a = 0; a < m; ++a) {
            if (successors[s][a] >= n) throw EnvError("finite_mdp: successor out of range");
            g_max = std::max(g_max, std::abs(costs[s][a]));
        }
    }
    EnvModel::Spec spec;
    spec.name = std::move(name);
    spec.num_actions = static_cast<unsigned>(m);
    spec.gamma = gamma;
    spec.g_max = g_max;
    spec.finite_states = n;
    spec.step = [succ = std::move(successors)](const State& x, unsigned a) {
        return State{static_cast<double>(succ[static_cast<std::size_t>(x[0])][a])};
    };
    spec.cost = [c = std::move(costs)](const State& x, unsigned a) { return c[static_cast<std::size_t>(x[0])][a]; };
    return EnvModel(std::move(spec));
}

EnvModel constant_cost_env(double c, double gamma, unsigned num_actions) {
    EnvModel::Spec spec;
    spec.name = "constant";
    spec.num_actions = num_actions;
    spec.gamma = gamma;
    spec.g_max = std::abs(c);
    spec.finite_states = 1;
    spec.step = [](const State& x, unsigned) { return x; };
    spec.cost = [c](const State&, unsigned) { return c; };
    return EnvModel(std::move(spec));
}

}  // namespace scorelife
