#pragma once

#include <functional>
#include <stdexcept>

#include "scorelife/life_codec.hpp"

namespace scorelife {

/// Largest double below 1; the right end of the life-value domain.
inline constexpr double kLastBelowOne = 1.0 - 0x1p-53;

/// A representation could not be fitted from its samples.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Score-life function S(., x) of one fixed state: maps a life value to the
/// discounted cost of the encoded action sequence.
///
/// Representations that are naturally functions of a real argument (basis
/// expansions, polynomials) evaluate `at(LifeValue)` through its projection;
/// rollout-backed ones evaluate `at_real` through the exact binary expansion.
class ScoreLifeRep {
public:
    virtual ~ScoreLifeRep() = default;

    virtual double at(const LifeValue& l) const = 0;
    /// Real argument in [0,1]; l = 1 means the all-(M-1) limit sequence.
    virtual double at_real(double l) const = 0;
    virtual unsigned base() const = 0;
};

/// Adapter for an analytic function of the real life value.
class RealFunctionRep final : public ScoreLifeRep {
public:
    RealFunctionRep(std::function<double(double)> f, unsigned base = 2) : f_(std::move(f)), base_(base) {}

    double at(const LifeValue& l) const override { return f_(l.value()); }
    double at_real(double l) const override { return f_(l); }
    unsigned base() const override { return base_; }

private:
    std::function<double(double)> f_;
    unsigned base_;
};

}  // namespace scorelife
