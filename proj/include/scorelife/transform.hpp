#pragma once

// Relating the Score-life functions of two states.  If an N-step trajectory
// leads from x0 to xN with prefix phase phi (the life value of its first N
// actions) and discounted prefix cost psi, then
//
//   S(l, xN) = (S(l / M^N + phi, x0) - psi) / gamma^N.
//
// With an integral N and known digits the argument is formed exactly by digit
// concatenation; during regression N is treated as a continuous parameter.

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "json.hpp"
#include "scorelife/env.hpp"
#include "scorelife/score_life.hpp"

namespace scorelife {

class TransformError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct TransformParams {
    unsigned base = 2;
    double phi = 0.0;    // value of the prefix phase, in [0,1)
    double psi = 0.0;    // discounted prefix cost
    double steps = 0.0;  // N; integral when derived from a trajectory
    std::optional<LifeValue> phi_digits;  // exact N-digit prefix when known

    static TransformParams identity(unsigned base) { return {base, 0.0, 0.0, 0.0, LifeValue(base)}; }
};

TransformParams params_from_trajectory(const Trajectory& traj, double gamma, unsigned base);

/// Parameters of traj_a followed by traj_b (traj_b starting where traj_a ends):
/// psi = psi_a + gamma^N psi_b, phi = phi_a ++ phi_b.
TransformParams compose_params(const TransformParams& a, const TransformParams& b, double gamma);

/// S(l, xN) from the base representation at x0.  Throws TransformError when
/// the transformed argument leaves [0,1).
double apply_transform(const ScoreLifeRep& base, const TransformParams& p, double gamma, const LifeValue& l);
/// Real-argument form, valid for continuous N.
double apply_transform(const ScoreLifeRep& base, const TransformParams& p, double gamma, double l);

/// The transformed function as a representation in its own right.
class TransformedRep final : public ScoreLifeRep {
public:
    TransformedRep(const ScoreLifeRep& base, TransformParams p, double gamma)
        : base_(&base), p_(std::move(p)), gamma_(gamma) {}
    double at(const LifeValue& l) const override { return apply_transform(*base_, p_, gamma_, l); }
    double at_real(double l) const override { return apply_transform(*base_, p_, gamma_, l); }
    unsigned base() const override { return base_->base(); }

private:
    const ScoreLifeRep* base_;
    TransformParams p_;
    double gamma_;
};

struct TransformFitConfig {
    std::size_t n_samples = 16;  // at least 3
    std::uint64_t seed = 0;
    double psi_bound = 1e6;  // psi searched in [-psi_bound, psi_bound]
    double max_steps = 64.0;
    unsigned scan_steps = 10;    // integer N values tried by the coarse scan
    std::size_t phi_grid = 1024;  // uniform phi candidates per N (plus exact digit prefixes)
    std::size_t polish_starts = 8;
    double reliable_rms = 1e-6;  // RMS residual (relative to max(1, |S|)) above this is unreliable
};

struct TransformFit {
    TransformParams continuous;
    double residual_continuous = 0.0;  // sum of squared residuals
    TransformParams snapped;           // N rounded to the nearest positive integer
    double residual_snapped = 0.0;
    TransformParams chosen;  // snapped unless it worsens the residual by more than 10%
    double residual = 0.0;
    bool used_snap = false;
    bool reliable = false;
};

/// Least-squares fit of (phi, psi, N) to samples of the target Score-life
/// function: a seeded coarse scan over integer N and phi (psi in closed form)
/// followed by bounded Levenberg-Marquardt polishing.
TransformFit fit_params(const ScoreLifeRep& base, const ScoreLifeRep& target, double gamma,
                        const TransformFitConfig& cfg);

void to_json(nlohmann::json& j, const TransformParams& p);
void to_json(nlohmann::json& j, const TransformFit& fit);

}  // namespace scorelife
