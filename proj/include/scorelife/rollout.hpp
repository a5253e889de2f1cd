#pragma once

// Ground-truth Score-life evaluation by truncated rollout, the one-step recursion
// residual, the tabular fixed-point sweep over a dyadic grid, and
// exhaustive grid minimisation.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "scorelife/env.hpp"
#include "scorelife/score_life.hpp"

namespace scorelife {

/// Smallest horizon n with gamma^(n+1) * g_max / (1 - gamma) < tol.
std::size_t default_horizon(double gamma, double g_max, double tol = 1e-6);
double tail_bound(double gamma, double g_max, std::size_t horizon);

/// S_n(l, x0) = sum_{k=0}^{n} gamma^k g(x_k, u_k) with u_k the k-th digit of l
/// (zero past the stored digits).
double eval(const EnvModel& env, const LifeValue& l, const State& x0, std::size_t horizon);

class TruncatedEvaluator final : public ScoreLifeRep {
public:
    TruncatedEvaluator(EnvModel env, State x0, std::size_t horizon);
    /// Horizon chosen by default_horizon for the environment's G_max.
    TruncatedEvaluator(EnvModel env, State x0);

    double at(const LifeValue& l) const override;
    double at_real(double l) const override;
    unsigned base() const override { return env_.num_actions(); }

    const EnvModel& env() const noexcept { return env_; }
    const State& state() const noexcept { return x0_; }
    std::size_t horizon() const noexcept { return horizon_; }
    /// Digits consumed by one evaluation.
    std::size_t depth() const noexcept { return horizon_ + 1; }
    double tail_bound() const;

private:
    EnvModel env_;
    State x0_;
    std::size_t horizon_;
};

using ShiftFn = std::function<std::pair<ActionCode, LifeValue>(const LifeValue&)>;

/// |S_n(l,x) - g(x,h) - gamma * S_{n-1}(t, f(x,h))| where (h, t) = shift(l).
double theorem1_residual(const EnvModel& env, const LifeValue& l, const State& x, std::size_t horizon,
                         const ShiftFn& shift_fn = shift);

// --- tabular sweep ------------------------------------------------------------

/// S[x][l] over a finite region X_f and the complete depth-d base-M grid.
/// Grid point k stands for the digit string of k written with d base-M digits.
struct TabularScore {
    std::vector<State> region;
    unsigned base = 2;
    unsigned depth = 1;
    std::vector<std::vector<std::size_t>> successor;  // [x][a] -> region index
    std::vector<std::vector<double>> cost;            // [x][a]
    std::size_t projected = 0;  // (x, a) pairs whose successor was projected onto X_f
    std::vector<double> table;  // row-major [x][k]

    std::size_t grid_size() const noexcept { return table.size() / region.size(); }
    double at(std::size_t x, std::size_t k) const { return table[x * grid_size() + k]; }
    double& at(std::size_t x, std::size_t k) { return table[x * grid_size() + k]; }
    /// Grid index of the first `depth` digits of l.
    std::size_t grid_index(const LifeValue& l) const;
    LifeValue grid_point(std::size_t k) const;
};

/// Zero-initialised table.  Successors outside the region go to the nearest
/// region state (Euclidean) and are counted in `projected`.
TabularScore make_tabular(const EnvModel& env, std::vector<State> region, unsigned depth);
/// Region = every state of a finite environment.
TabularScore make_tabular(const EnvModel& env, unsigned depth);

struct SweepResult {
    TabularScore next;
    double delta = 0.0;  // sup-norm change
};

/// One Jacobi sweep: S'(l,x) = g(x,h) + gamma S({M l}, f(x,h)); the shifted
/// point loses its first digit and is padded with a trailing zero.
SweepResult tabular_sweep(const TabularScore& ts, double gamma);

struct TabularSolution {
    TabularScore score;
    std::vector<double> deltas;
    std::string stop_reason;  // "converged" or "sweep_cap"
};

TabularSolution solve_tabular(TabularScore ts, double gamma, double tol = 1e-9, std::size_t max_sweeps = 10000);

/// S(., x) read from a table (digits beyond the table depth are ignored).
class TabularView final : public ScoreLifeRep {
public:
    TabularView(const TabularScore& ts, std::size_t state) : ts_(&ts), state_(state) {}
    double at(const LifeValue& l) const override { return ts_->at(state_, ts_->grid_index(l)); }
    double at_real(double l) const override;
    unsigned base() const override { return ts_->base; }

private:
    const TabularScore* ts_;
    std::size_t state_;
};

// --- optimal cost extraction ------------------------------------------------

struct GridMin {
    LifeValue l;
    double value = 0.0;
};

/// Exhaustive minimum over the M^d grid; ties go to the smallest l.
GridMin grid_argmin(const ScoreLifeRep& rep, unsigned depth);

/// kappa^-1(floor(M l*)): the first action of the encoded sequence.
ActionCode extract_policy(const LifeValue& l_star);

}  // namespace scorelife
