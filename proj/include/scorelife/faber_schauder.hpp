#pragma once

// Faber-Schauder expansion of a Score-life function:
//
//   S(l) ~ a0 + a1 l + sum_{j<n} sum_{i<2^j} a_ij e_ij(l),
//   e_ij(l) = 2^j (|l - i/2^j| + |l - (i+1)/2^j| - |2l - (2i+1)/2^j|),
//
// a hat of height 1 on [i/2^j, (i+1)/2^j].  The order-n partial sum
// interpolates S at every point k/2^n.

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "scorelife/env.hpp"
#include "scorelife/score_life.hpp"

namespace scorelife {

inline constexpr unsigned kMaxFsOrder = 16;

double basis_eval(std::size_t i, unsigned j, double l);
/// d e_ij / dl with d|a l - b|/dl taken as +a at the kink l = b/a.
double basis_slope(std::size_t i, unsigned j, double l);

class FSRep final : public ScoreLifeRep {
public:
    FSRep() = default;
    FSRep(unsigned order, unsigned base, State state);

    unsigned order() const noexcept { return order_; }
    const State& state() const noexcept { return state_; }
    std::size_t coefficient_count() const noexcept { return 2 + alpha_.size(); }

    double alpha0() const noexcept { return alpha0_; }
    double alpha1() const noexcept { return alpha1_; }
    double alpha(std::size_t i, unsigned j) const;
    void set_alpha0(double v) { alpha0_ = v; }
    void set_alpha1(double v) { alpha1_ = v; }
    void set_alpha(std::size_t i, unsigned j, double v);

    /// Partial-sum value at l in [0,1].
    double reconstruct(double l) const;
    /// Sum of hat slopes plus a1, using the kink convention of basis_slope.
    double derivative(double l) const;

    double at(const LifeValue& l) const override { return reconstruct(l.value()); }
    double at_real(double l) const override { return reconstruct(l); }
    unsigned base() const override { return base_; }

private:
    std::size_t slot(std::size_t i, unsigned j) const;

    unsigned order_ = 0;
    unsigned base_ = 2;
    double alpha0_ = 0.0;
    double alpha1_ = 0.0;
    std::vector<double> alpha_;  // level-major, slot (2^j - 1) + i
    State state_;
};

/// Computes all coefficients from 2^n + 1 queries: S at k/2^n (exact dyadic
/// life values) and at the l = 1 limit.  Coefficients below 1e-12 in
/// magnitude are stored as zero.
FSRep fit_fs(const ScoreLifeRep& evaluator, const State& x, unsigned order);

void to_json(nlohmann::json& j, const FSRep& rep);
FSRep fs_from_json(const nlohmann::json& j);

}  // namespace scorelife
