#include "scorelife/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scorelife/parallel.hpp"

namespace scorelife {

std::size_t default_horizon(double gamma, double g_max, double tol) {
    if (g_max <= 0.0) return 0;
    std::size_t n = 0;
    while (tail_bound(gamma, g_max, n) >= tol) ++n;
    return n;
}

double tail_bound(double gamma, double g_max, std::size_t horizon) {
    return std::pow(gamma, static_cast<double>(horizon + 1)) * g_max / (1.0 - gamma);
}

double eval(const EnvModel& env, const LifeValue& l, const State& x0, std::size_t horizon) {
    if (l.base() != env.num_actions()) throw EnvError("life value base does not match environment");
    const double gamma = env.gamma();
    double total = 0.0, discount = 1.0;
    State x = x0;
    for (std::size_t k = 0; k <= horizon; ++k) {
        if (env.is_terminal(x)) break;
        const unsigned u = l.digit(k);
        total += discount * env.stage_cost(x, u);
        x = env.next(x, u);
        discount *= gamma;
    }
    return total;
}

TruncatedEvaluator::TruncatedEvaluator(EnvModel env, State x0, std::size_t horizon)
    : env_(std::move(env)), x0_(std::move(x0)), horizon_(horizon) {}

TruncatedEvaluator::TruncatedEvaluator(EnvModel env, State x0)
    : TruncatedEvaluator(env, std::move(x0), default_horizon(env.gamma(), env.g_max())) {}

double TruncatedEvaluator::at(const LifeValue& l) const { return eval(env_, l, x0_, horizon_); }

double TruncatedEvaluator::at_real(double l) const {
    if (l >= 1.0) return at(LifeValue::all_max(base(), depth()));
    return at(LifeValue::from_real(l, base(), depth()));
}

double TruncatedEvaluator::tail_bound() const { return scorelife::tail_bound(env_.gamma(), env_.g_max(), horizon_); }

double theorem1_residual(const EnvModel& env, const LifeValue& l, const State& x, std::size_t horizon,
                         const ShiftFn& shift_fn) {
    const double lhs = eval(env, l, x, horizon);
    const auto [head, tail] = shift_fn(l);
    double rhs = env.stage_cost(x, head.index);
    if (horizon > 0) rhs += env.gamma() * eval(env, tail, env.next(x, head.index), horizon - 1);
    return std::abs(lhs - rhs);
}

// --- tabular sweep ------------------------------------------------------------

std::size_t TabularScore::grid_index(const LifeValue& l) const {
    std::size_t k = 0;
    for (unsigned i = 0; i < depth; ++i) k = k * base + l.digit(i);
    return k;
}

LifeValue TabularScore::grid_point(std::size_t k) const {
    std::vector<std::uint8_t> digits(depth, 0);
    for (unsigned i = depth; i-- > 0;) {
        digits[i] = static_cast<std::uint8_t>(k % base);
        k /= base;
    }
    return {base, std::move(digits)};
}

namespace {

std::size_t checked_grid_size(unsigned base, unsigned depth) {
    const double size = std::pow(static_cast<double>(base), depth);
    if (size > 1e8) throw EnvError("tabular grid of " + std::to_string(size) + " points is too large");
    return static_cast<std::size_t>(size);
}

}  // namespace

TabularScore make_tabular(const EnvModel& env, std::vector<State> region, unsigned depth) {
    if (depth < 1) throw EnvError("tabular grid depth must be at least 1");
    if (region.empty()) throw EnvError("tabular region is empty");
    TabularScore ts;
    ts.base = env.num_actions();
    ts.depth = depth;
    ts.region = std::move(region);
    const std::size_t grid = checked_grid_size(ts.base, depth);
    ts.table.assign(ts.region.size() * grid, 0.0);
    ts.successor.assign(ts.region.size(), std::vector<std::size_t>(ts.base, 0));
    ts.cost.assign(ts.region.size(), std::vector<double>(ts.base, 0.0));
    for (std::size_t x = 0; x < ts.region.size(); ++x) {
        for (unsigned a = 0; a < ts.base; ++a) {
            ts.cost[x][a] = env.stage_cost(ts.region[x], a);
            const State nx = env.next(ts.region[x], a);
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t y = 0; y < ts.region.size(); ++y) {
                double d = 0.0;
                for (std::size_t c = 0; c < nx.size(); ++c) d += (nx[c] - ts.region[y][c]) * (nx[c] - ts.region[y][c]);
                if (d < best_d) {
                    best_d = d;
                    best = y;
                }
            }
            if (best_d != 0.0) ++ts.projected;
            ts.successor[x][a] = best;
        }
    }
    return ts;
}

TabularScore make_tabular(const EnvModel& env, unsigned depth) {
    const auto n = env.finite_states();
    if (!n) throw EnvError("make_tabular without a region needs a finite environment");
    std::vector<State> region;
    for (std::size_t i = 0; i < *n; ++i) region.push_back(env.finite_state(i));
    return make_tabular(env, std::move(region), depth);
}

SweepResult tabular_sweep(const TabularScore& ts, double gamma) {
    SweepResult out{ts, 0.0};
    const std::size_t grid = ts.grid_size();
    const std::size_t lead = grid / ts.base;  // weight of the first digit
    std::vector<double> row_delta(ts.region.size(), 0.0);
    parallel_for(ts.region.size(), [&](std::size_t x) {
        double d = 0.0;
        for (std::size_t k = 0; k < grid; ++k) {
            const std::size_t head = k / lead;
            const std::size_t tail = (k % lead) * ts.base;
            const double v = ts.cost[x][head] + gamma * ts.at(ts.successor[x][head], tail);
            d = std::max(d, std::abs(v - ts.at(x, k)));
            out.next.at(x, k) = v;
        }
        row_delta[x] = d;
    });
    out.delta = *std::max_element(row_delta.begin(), row_delta.end());
    return out;
}

TabularSolution solve_tabular(TabularScore ts, double gamma, double tol, std::size_t max_sweeps) {
    TabularSolution sol{std::move(ts), {}, "sweep_cap"};
    for (std::size_t s = 0; s < max_sweeps; ++s) {
        auto r = tabular_sweep(sol.score, gamma);
        sol.score = std::move(r.next);
        sol.deltas.push_back(r.delta);
        if (r.delta < tol) {
            sol.stop_reason = "converged";
            break;
        }
    }
    return sol;
}

double TabularView::at_real(double l) const {
    if (l >= 1.0) return at(LifeValue::all_max(ts_->base, ts_->depth));
    return at(LifeValue::from_real(l, ts_->base, ts_->depth));
}

// --- optimal cost extraction ------------------------------------------------

GridMin grid_argmin(const ScoreLifeRep& rep, unsigned depth) {
    const unsigned base = rep.base();
    const std::size_t grid = checked_grid_size(base, depth);
    std::vector<double> values(grid);
    parallel_for(grid, [&](std::size_t k) {
        std::vector<std::uint8_t> digits(depth, 0);
        std::size_t r = k;
        for (unsigned i = depth; i-- > 0;) {
            digits[i] = static_cast<std::uint8_t>(r % base);
            r /= base;
        }
        values[k] = rep.at(LifeValue(base, std::move(digits)));
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < grid; ++k)
        if (values[k] < values[best]) best = k;
    std::vector<std::uint8_t> digits(depth, 0);
    std::size_t r = best;
    for (unsigned i = depth; i-- > 0;) {
        digits[i] = static_cast<std::uint8_t>(r % base);
        r /= base;
    }
    return {LifeValue(base, std::move(digits)), values[best]};
}

ActionCode extract_policy(const LifeValue& l_star) { return shift(l_star).first; }

}  // namespace scorelife
