#pragma once

// Polynomial approximation of Score-life functions, closed-form minimisation,
// and one-step Bellman action selection on top of it.
//
// The minimiser of a polynomial fit is deliberately not exposed as a life
// value: it need not encode a good action sequence, only its value is used.

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "scorelife/env.hpp"
#include "scorelife/score_life.hpp"

namespace scorelife {

struct PolyFitConfig {
    unsigned degree = 2;
    std::size_t n_samples = 200;
    std::uint64_t seed = 0;
    std::size_t sample_depth = 96;  // random digits per sampled life value
};

class PolyRep final : public ScoreLifeRep {
public:
    PolyRep() = default;
    PolyRep(std::vector<double> coeffs, unsigned base = 2, State state = {});

    unsigned degree() const noexcept { return static_cast<unsigned>(coeffs_.size() - 1); }
    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    const State& state() const noexcept { return state_; }

    double eval(double l) const;
    double at(const LifeValue& l) const override { return eval(l.value()); }
    double at_real(double l) const override { return eval(l); }
    unsigned base() const override { return base_; }

    std::size_t sample_count = 0;
    double rms = 0.0;

private:
    std::vector<double> coeffs_{0.0, 0.0};  // a_0 .. a_degree
    unsigned base_ = 2;
    State state_;
};

/// Uniform random life values of cfg.sample_depth digits, seeded.
std::vector<LifeValue> sample_life_values(unsigned base, std::size_t count, std::uint64_t seed, std::size_t depth);

/// Least squares over (l_i, S(l_i)) for l_i drawn uniformly.  Throws FitError
/// (with the design-matrix condition number) when the samples cannot
/// determine all coefficients.
PolyRep fit_poly(const ScoreLifeRep& evaluator, const State& x, const PolyFitConfig& cfg);
/// Least squares on given samples.
PolyRep fit_poly(std::span<const double> l, std::span<const double> y, unsigned degree, unsigned base = 2,
                 State x = {});

struct PolyMin {
    double l = 0.0;
    double value = 0.0;
};

/// Global minimum over [0,1): endpoints plus the real critical points inside
/// (companion-matrix roots of the derivative up to degree 5, a dense grid with
/// local refinement above).
PolyMin poly_min(const PolyRep& rep);

/// argmin_a g(x,a) + gamma min_l S_poly(l, f(x,a)); ties go to the lower code.
/// `successor_reps[a]` approximates the Score-life function of f(x,a).
ActionCode bellman_action(const EnvModel& env, const State& x, const std::vector<PolyRep>& successor_reps);

struct BellmanChoice {
    ActionCode action;
    std::vector<double> q;  // g(x,a) + gamma min_l S_poly(l, f(x,a))
    std::vector<PolyRep> reps;
};

/// Fits a fresh polynomial for every successor (same sample set for each)
/// with a truncated-rollout evaluator of the given horizon, then selects.
BellmanChoice bellman_select(const EnvModel& env, const State& x, const PolyFitConfig& cfg, std::size_t horizon);

void to_json(nlohmann::json& j, const PolyRep& rep);
PolyRep poly_from_json(const nlohmann::json& j);

}  // namespace scorelife
