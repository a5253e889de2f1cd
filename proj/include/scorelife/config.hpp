#pragma once

// Experiment configuration as a flat `key = value` file.  Every known key
// has a default; unknown keys and malformed values are rejected.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scorelife/env.hpp"
#include "scorelife/fractal_opt.hpp"
#include "scorelife/poly_approx.hpp"

namespace scorelife {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    // environment
    std::string env = "cartpole";  // cartpole | cycle | constant | finite
    CostKind cost = CostKind::reward;
    double gamma = 0.8;
    std::vector<double> gammas{0.5, 0.6, 0.7, 0.8};
    std::size_t cycle_states = 3;
    double constant_cost = 1.0;
    State state;  // empty: the origin of the chosen environment
    CartpoleParams cartpole;

    // evaluation
    std::size_t horizon = 0;  // 0: smallest n with tail bound below tail_tol
    double tail_tol = 1e-6;
    unsigned grid_depth = 10;

    // exact method
    unsigned order = 10;
    double eta = 0.001;
    double delta = 0.01;
    std::size_t max_iters = 100000;
    std::size_t restarts = 8;
    unsigned prescan_depth = 10;
    std::size_t prefix = 10;

    // approximate method
    unsigned degree = 2;
    std::size_t samples = 200;
    std::size_t sample_depth = 96;
    bool transform_successors = false;

    // control
    std::string method = "approx";  // approx | exact
    std::size_t seeds = 5;
    std::uint64_t seed = 0;
    std::size_t episode_cap = 500;
    double init_box = 0.05;

    // transform regression
    std::size_t transform_samples = 16;
    double psi_bound = 1e6;

    // plotting
    std::size_t plot_samples = 1024;
    std::string plot_sampling = "uniform";  // uniform | dyadic
    bool svg = true;

    // files
    std::string out = "out";
    std::string policy;
    std::string base_rep;
    std::string mdp;  // finite env: CSV rows state,action,next,cost

    /// Sets one key from its textual value.  Throws ConfigError.
    void set(const std::string& key, const std::string& value);
    /// All keys with their current values, in a fixed order.
    std::vector<std::pair<std::string, std::string>> entries() const;
    static const std::vector<std::string>& keys();

    /// Throws ConfigError on out-of-range values.
    void validate() const;

    EnvModel make_env() const;
    std::size_t resolved_horizon(const EnvModel& env) const;
    State resolved_state(const EnvModel& env) const;
    OptimizerConfig optimizer() const;
    PolyFitConfig poly() const;
};

/// Finite MDP from CSV rows `state,action,next,cost` (header optional).
EnvModel load_finite_mdp(const std::string& path, double gamma);

/// Parses `key = value` lines; `#` starts a comment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
void write_config(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace scorelife
