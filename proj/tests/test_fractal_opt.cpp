#include "doctest.h"
#include "scorelife/fractal_opt.hpp"
#include "scorelife/rollout.hpp"

using namespace scorelife;

namespace {

FSRep rep_of(double (*f)(double), unsigned order = 10) { return fit_fs(RealFunctionRep(f, 2), {}, order); }

}  // namespace

TEST_CASE("gradient descent on a quadratic bowl") {
    const auto rep = rep_of([](double l) { return (l - 0.3) * (l - 0.3); });
    OptimizerConfig cfg;
    cfg.delta = 1e-4;
    const auto r = gradient_descent(rep, cfg, 0.9);
    CHECK(r.reason == StopReason::small_gradient);
    CHECK(std::abs(r.l - 0.3) <= 0.01);
    CHECK(r.value == doctest::Approx(rep.reconstruct(r.l)));

    // with the default threshold the stop rule only guarantees |2(l - 0.3)| < 0.1
    const auto d = gradient_descent(rep, OptimizerConfig{}, 0.9);
    CHECK(d.reason == StopReason::small_gradient);
    CHECK(std::abs(d.l - 0.3) <= 0.05 + 1e-3);
}

TEST_CASE("gradient descent stop rules") {
    const auto vee = rep_of([](double l) { return std::abs(l - 0.5); });
    const auto v = gradient_descent(vee, OptimizerConfig{}, 0.8);
    CHECK(v.reason == StopReason::sign_flip);
    CHECK(std::abs(v.l - 0.5) <= 0.002 + 1e-9);

    const auto flat = rep_of([](double) { return 4.0; });
    const auto f = gradient_descent(flat, OptimizerConfig{}, 0.42);
    CHECK(f.reason == StopReason::small_gradient);
    CHECK(f.iterations == 0);
    CHECK(f.l == 0.42);

    const auto ramp = rep_of([](double l) { return l; });
    const auto left = gradient_descent(ramp, OptimizerConfig{}, 0.0005);
    CHECK(left.reason == StopReason::left_domain);
    CHECK(left.l == 0.0);
    const auto down = rep_of([](double l) { return -l; });
    const auto right = gradient_descent(down, OptimizerConfig{}, 0.9995);
    CHECK(right.reason == StopReason::left_domain);
    CHECK(right.l == kLastBelowOne);
    CHECK(right.l < 1.0);

    OptimizerConfig capped;
    capped.max_iters = 10;
    const auto c = gradient_descent(ramp, capped, 0.9);
    CHECK(c.reason == StopReason::iteration_cap);
    CHECK(c.iterations == 10);
    CHECK(c.l == doctest::Approx(0.9 - 10 * 0.001));

    OptimizerConfig bad;
    bad.eta = 0.0;
    CHECK_THROWS(gradient_descent(ramp, bad, 0.5));
    bad = {};
    bad.delta = -1.0;
    CHECK_THROWS(gradient_descent(ramp, bad, 0.5));
}

TEST_CASE("multistart") {
    const auto cart = make_cartpole(CostKind::quadratic, 0.5);
    const TruncatedEvaluator e(cart, {0, 0, 0, 0});
    const auto rep = fit_fs(e, {0, 0, 0, 0}, 10);

    OptimizerConfig one;
    one.restarts = 1;
    one.prescan_depth = 0;
    for (std::uint64_t seed : {0u, 1u, 2u}) {
        one.seed = seed;
        const auto m = multistart_min(rep, one);
        const auto g = gradient_descent(rep, one);
        CHECK(m.l == g.l);
        CHECK(m.value == g.value);
        CHECK(m.reason == g.reason);
    }

    double grid_min = 1e300;
    for (int k = 0; k < 1024; ++k) grid_min = std::min(grid_min, rep.reconstruct(k / 1024.0));

    for (std::uint64_t seed : {0u, 5u, 9u}) {
        OptimizerConfig cfg;
        cfg.seed = seed;
        cfg.prescan_depth = 0;
        double prev = 1e300;
        for (std::size_t r = 1; r <= 8; ++r) {
            cfg.restarts = r;
            const auto m = multistart_min(rep, cfg);
            CHECK(m.value <= prev);
            CHECK(m.l >= 0.0);
            CHECK(m.l < 1.0);
            prev = m.value;
        }
        cfg.restarts = 8;
        cfg.prescan_depth = 10;
        const auto full = multistart_min(rep, cfg);
        CHECK(full.value <= prev);
        CHECK(full.value <= gradient_descent(rep, cfg).value);
        CHECK(std::abs(full.value - grid_min) <= 1e-3);
    }
}
