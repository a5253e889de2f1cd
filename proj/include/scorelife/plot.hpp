#pragma once

// Sampled (l, S) curves, their total variation, and CSV/SVG output.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scorelife/score_life.hpp"

namespace scorelife {

enum class Sampling { uniform, dyadic };
Sampling parse_sampling(const std::string& s);

struct Curve {
    std::string label;
    std::vector<double> l;  // ascending
    std::vector<double> s;
};

/// `count` points: seeded uniform life values (sorted), or the first
/// dyadic grid with at least `count` points.
Curve sample_curve(const ScoreLifeRep& rep, std::size_t count, Sampling sampling, std::uint64_t seed,
                   std::string label = {});

/// Sum of |S_{k+1} - S_k| along the sorted samples.
double total_variation(const Curve& c);

void write_curve_csv(std::ostream& out, const Curve& c);
/// One polyline per curve on shared axes.
void write_svg(std::ostream& out, const std::vector<Curve>& curves, const std::string& title);

}  // namespace scorelife
