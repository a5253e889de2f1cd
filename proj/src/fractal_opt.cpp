#include "scorelife/fractal_opt.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "scorelife/parallel.hpp"

namespace scorelife {

void OptimizerConfig::validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("gradient threshold must be positive");
    if (max_iters == 0) throw std::invalid_argument("max_iters must be positive");
    if (prescan_depth > 24) throw std::invalid_argument("prescan depth above 24");
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::small_gradient: return "small_gradient";
        case StopReason::sign_flip: return "sign_flip";
        case StopReason::left_domain: return "left_domain";
        case StopReason::iteration_cap: return "iteration_cap";
    }
    return "unknown";
}

namespace {

double restart_start(std::uint64_t seed, std::size_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

DescentResult gradient_descent(const FSRep& rep, const OptimizerConfig& cfg, double start) {
    cfg.validate();
    DescentResult out;
    double l = std::clamp(start, 0.0, kLastBelowOne);
    double prev_grad = 0.0;
    for (std::size_t i = 0;; ++i) {
        const double g = rep.derivative(l);
        if (g * g < cfg.delta) {
            out.reason = StopReason::small_gradient;
            out.iterations = i;
            break;
        }
        double next = l - cfg.eta * g;
        const bool left = next < 0.0 || next > kLastBelowOne;
        l = std::clamp(next, 0.0, kLastBelowOne);
        if (left) {
            out.reason = StopReason::left_domain;
            out.iterations = i + 1;
            break;
        }
        // no previous gradient exists on the first iteration
        if (i > 0 && prev_grad * g < 0.0) {
            out.reason = StopReason::sign_flip;
            out.iterations = i + 1;
            break;
        }
        prev_grad = g;
        if (i + 1 >= cfg.max_iters) {
            out.reason = StopReason::iteration_cap;
            out.iterations = i + 1;
            break;
        }
    }
    out.l = l;
    out.value = rep.reconstruct(l);
    return out;
}

DescentResult gradient_descent(const FSRep& rep, const OptimizerConfig& cfg) {
    return gradient_descent(rep, cfg, restart_start(cfg.seed, 0));
}

MultistartResult multistart_min(const FSRep& rep, const OptimizerConfig& cfg) {
    cfg.validate();
    if (cfg.restarts == 0) throw std::invalid_argument("multistart needs at least one restart");
    std::vector<DescentResult> runs(cfg.restarts);
    parallel_for(cfg.restarts, [&](std::size_t r) { runs[r] = gradient_descent(rep, cfg, restart_start(cfg.seed, r)); });

    MultistartResult best;
    best.restarts_used = cfg.restarts;
    best.l = runs[0].l;
    best.value = runs[0].value;
    best.reason = runs[0].reason;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].value < best.value) {
            best.l = runs[r].l;
            best.value = runs[r].value;
            best.reason = runs[r].reason;
        }

    if (cfg.prescan_depth > 0) {
        const std::size_t points = std::size_t{1} << cfg.prescan_depth;
        std::size_t k_best = 0;
        double v_best = rep.reconstruct(0.0);
        for (std::size_t k = 1; k < points; ++k) {
            const double v = rep.reconstruct(static_cast<double>(k) / static_cast<double>(points));
            if (v < v_best) {
                v_best = v;
                k_best = k;
            }
        }
        const double l_grid = static_cast<double>(k_best) / static_cast<double>(points);
        if (v_best < best.value) {
            best.l = l_grid;
            best.value = v_best;
            best.reason = StopReason::small_gradient;
            best.from_prescan = true;
        }
        const auto polished = gradient_descent(rep, cfg, l_grid);
        if (polished.value < best.value) {
            best.l = polished.l;
            best.value = polished.value;
            best.reason = polished.reason;
            best.from_prescan = true;
        }
    }
    return best;
}

}  // namespace scorelife
