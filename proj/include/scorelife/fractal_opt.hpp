#pragma once

// Minimisation of Faber-Schauder Score-life representations over [0,1).

#include <cstdint>
#include <string>

#include "scorelife/faber_schauder.hpp"

namespace scorelife {

struct OptimizerConfig {
    double eta = 0.001;   // learning rate
    double delta = 0.01;  // stop once (dS/dl)^2 < delta
    std::size_t max_iters = 100000;
    std::size_t restarts = 8;
    unsigned prescan_depth = 10;  // dyadic grid pre-scan for multistart; 0 disables
    std::uint64_t seed = 0;

    void validate() const;
};

enum class StopReason { small_gradient, sign_flip, left_domain, iteration_cap };
std::string to_string(StopReason r);

struct DescentResult {
    double l = 0.0;
    double value = 0.0;
    StopReason reason = StopReason::iteration_cap;
    std::size_t iterations = 0;
};

/// l <- l - eta dS/dl from `start` until the squared gradient drops below
/// delta, the gradient changes sign between consecutive iterations, a step
/// leaves [0, 1) (the iterate is clamped), or the iteration cap is hit.
DescentResult gradient_descent(const FSRep& rep, const OptimizerConfig& cfg, double start);
/// Start drawn from Uniform(0,1) with cfg.seed.
DescentResult gradient_descent(const FSRep& rep, const OptimizerConfig& cfg);

struct MultistartResult {
    double l = 0.0;
    double value = 0.0;
    StopReason reason = StopReason::iteration_cap;  // of the winning run; grid winner reports small_gradient
    std::size_t restarts_used = 0;
    bool from_prescan = false;
};

/// Best of `restarts` descents (restart r seeded from (seed, r)) and the
/// dyadic grid pre-scan.  Restart sets are nested in r, so the result is
/// non-increasing in the restart count.
MultistartResult multistart_min(const FSRep& rep, const OptimizerConfig& cfg);

}  // namespace scorelife
