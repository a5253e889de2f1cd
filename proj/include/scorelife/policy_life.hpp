#pragma once

// Life values induced by a deterministic stationary policy on a finite state
// list: L = A L + C with A_ij = 1/M iff x_j = f(x_i, pi(x_i)) and
// C_i = kappa(pi(x_i)) / M.

#include <cstddef>
#include <vector>

#include <Eigen/SparseCore>

#include "scorelife/env.hpp"

namespace scorelife {

struct PolicyLifeSystem {
    unsigned base = 2;
    std::vector<ActionCode> policy;      // pi(x_i)
    std::vector<std::size_t> successor;  // index of f(x_i, pi(x_i))
    Eigen::SparseMatrix<double> A;        // one 1/M entry per row
    Eigen::VectorXd C;

    std::size_t size() const noexcept { return policy.size(); }
};

/// Throws EnvError when a successor is not in the state list.
PolicyLifeSystem build_system(const EnvModel& env, const std::vector<State>& states,
                              const std::vector<ActionCode>& policy);
PolicyLifeSystem build_system(const EnvModel& env, const std::vector<ActionCode>& policy);

struct PolicyLifeValues {
    std::vector<double> values;
    /// State whose action stream is M-1 forever: its life value is the limit 1,
    /// stored as exactly 1.
    std::vector<bool> boundary;
    double residual = 0.0;  // ||L - A L - C||_inf of the linear solution
    bool iterative = false;
};

enum class SolveMethod { automatic, direct, iterative };

/// Direct sparse LU up to 10^4 states, fixed-point iteration beyond (or as requested).
PolicyLifeValues solve(const PolicyLifeSystem& sys, SolveMethod method = SolveMethod::automatic);

/// Max over states of |L_i - value(encode(first n policy actions from x_i))|.
double verify_against_rollout(const PolicyLifeSystem& sys, const PolicyLifeValues& values, std::size_t n);

}  // namespace scorelife
