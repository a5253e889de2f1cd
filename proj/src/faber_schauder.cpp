#include "scorelife/faber_schauder.hpp"

#include <cmath>
#include <string>

#include "scorelife/parallel.hpp"

namespace scorelife {

namespace {

constexpr double kZeroCutoff = 1e-12;

void check_index(std::size_t i, unsigned j) {
    if (j > 62 || i >= (std::size_t{1} << j))
        throw std::out_of_range("basis index (i=" + std::to_string(i) + ", j=" + std::to_string(j) + ") out of range");
}

double kink_sign(double z) { return z >= 0.0 ? 1.0 : -1.0; }

}  // namespace

double basis_eval(std::size_t i, unsigned j, double l) {
    check_index(i, j);
    const double s = std::ldexp(1.0, static_cast<int>(j));
    const double a = static_cast<double>(i) / s;
    const double b = static_cast<double>(i + 1) / s;
    const double c = static_cast<double>(2 * i + 1) / s;
    return s * (std::abs(l - a) + std::abs(l - b) - std::abs(2.0 * l - c));
}

double basis_slope(std::size_t i, unsigned j, double l) {
    check_index(i, j);
    const double s = std::ldexp(1.0, static_cast<int>(j));
    const double a = static_cast<double>(i) / s;
    const double b = static_cast<double>(i + 1) / s;
    const double c = static_cast<double>(2 * i + 1) / s;
    return s * (kink_sign(l - a) + kink_sign(l - b) - 2.0 * kink_sign(2.0 * l - c));
}

FSRep::FSRep(unsigned order, unsigned base, State state)
    : order_(order), base_(base), alpha_((std::size_t{1} << order) - 1, 0.0), state_(std::move(state)) {
    if (order > kMaxFsOrder) throw FitError("Faber-Schauder order above " + std::to_string(kMaxFsOrder));
}

std::size_t FSRep::slot(std::size_t i, unsigned j) const {
    if (j >= order_) throw std::out_of_range("level " + std::to_string(j) + " beyond order");
    check_index(i, j);
    return ((std::size_t{1} << j) - 1) + i;
}

double FSRep::alpha(std::size_t i, unsigned j) const { return alpha_[slot(i, j)]; }
void FSRep::set_alpha(std::size_t i, unsigned j, double v) { alpha_[slot(i, j)] = v; }

double FSRep::reconstruct(double l) const {
    double s = alpha0_ + alpha1_ * l;
    // Only the hat whose cell contains l is nonzero at each level.
    for (unsigned j = 0; j < order_; ++j) {
        const std::size_t cells = std::size_t{1} << j;
        const double scaled = l * static_cast<double>(cells);
        auto i = static_cast<std::size_t>(std::floor(scaled));
        if (i >= cells) i = cells - 1;
        const double a = alpha_[cells - 1 + i];
        if (a == 0.0) continue;
        const double t = scaled - static_cast<double>(i);  // position in the cell
        s += a * (t < 0.5 ? 2.0 * t : 2.0 * (1.0 - t));
    }
    return s;
}

double FSRep::derivative(double l) const {
    // The kink convention makes every |.| term contribute its right slope, so
    // each level contributes the slope of the hat on the half-open cell
    // [i/2^j, (i+1)/2^j) containing l.
    double d = alpha1_;
    for (unsigned j = 0; j < order_; ++j) {
        const std::size_t cells = std::size_t{1} << j;
        const double scaled = l * static_cast<double>(cells);
        const auto i = static_cast<std::size_t>(std::floor(scaled));
        if (i >= cells) continue;  // l = 1: right of every support
        const double a = alpha_[cells - 1 + i];
        if (a == 0.0) continue;
        const double slope = std::ldexp(2.0, static_cast<int>(j));
        d += a * (scaled - static_cast<double>(i) < 0.5 ? slope : -slope);
    }
    return d;
}

FSRep fit_fs(const ScoreLifeRep& evaluator, const State& x, unsigned order) {
    FSRep rep(order, evaluator.base(), x);
    const std::size_t points = std::size_t{1} << order;
    std::vector<double> samples(points + 1);
    parallel_for(points + 1, [&](std::size_t k) {
        try {
            samples[k] = k == points ? evaluator.at_real(1.0)
                                     : evaluator.at(LifeValue::from_dyadic(k, order, evaluator.base()));
        } catch (const std::exception& e) {
            throw FitError("evaluator failed at l = " + std::to_string(k) + "/" + std::to_string(std::uint64_t{1} << order) + ": " +
                           e.what());
        }
    });
    auto clean = [](double v) { return std::abs(v) < kZeroCutoff ? 0.0 : v; };
    rep.set_alpha0(clean(samples[0]));
    rep.set_alpha1(clean(samples[points] - samples[0]));
    for (unsigned j = 0; j < order; ++j) {
        const std::size_t stride = points >> j;  // grid steps per level-j cell
        for (std::size_t i = 0; i < (std::size_t{1} << j); ++i) {
            const double left = samples[i * stride];
            const double right = samples[(i + 1) * stride];
            const double mid = samples[i * stride + stride / 2];
            rep.set_alpha(i, j, clean(mid - 0.5 * (left + right)));
        }
    }
    return rep;
}

void to_json(nlohmann::json& j, const FSRep& rep) {
    nlohmann::json alphas = nlohmann::json::array();
    for (unsigned lvl = 0; lvl < rep.order(); ++lvl)
        for (std::size_t i = 0; i < (std::size_t{1} << lvl); ++i)
            if (const double a = rep.alpha(i, lvl); a != 0.0) alphas.push_back({lvl, i, a});
    j = nlohmann::json{{"order", rep.order()}, {"M", rep.base()},    {"alpha0", rep.alpha0()},
                       {"alpha1", rep.alpha1()}, {"alpha", alphas}, {"state", rep.state()}};
}

FSRep fs_from_json(const nlohmann::json& j) {
    FSRep rep(j.at("order").get<unsigned>(), j.value("M", 2u), j.value("state", State{}));
    rep.set_alpha0(j.at("alpha0").get<double>());
    rep.set_alpha1(j.at("alpha1").get<double>());
    for (const auto& t : j.at("alpha")) rep.set_alpha(t.at(1).get<std::size_t>(), t.at(0).get<unsigned>(), t.at(2).get<double>());
    return rep;
}

}  // namespace scorelife
