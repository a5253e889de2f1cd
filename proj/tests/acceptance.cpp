// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "scorelife/controller.hpp"
#include "scorelife/faber_schauder.hpp"
#include "scorelife/plot.hpp"
#include "scorelife/policy_life.hpp"
#include "scorelife/poly_approx.hpp"
#include "scorelife/rollout.hpp"
#include "scorelife/transform.hpp"

using namespace scorelife;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

LifeValue random_string(std::mt19937_64& rng, std::size_t depth, unsigned m = 2) {
    std::uniform_int_distribution<unsigned> d(0, m - 1);
    std::vector<std::uint8_t> digits(depth);
    for (auto& x : digits) x = static_cast<std::uint8_t>(d(rng));
    return {m, digits};
}

std::vector<unsigned> digits_of(const LifeValue& l, std::size_t n) {
    std::vector<unsigned> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(l.digit(i));
    return out;
}

bool replay_valid(const Trajectory& tr) {
    const auto& s0 = tr.states.front();
    oracle::Cart c{s0[0], s0[1], s0[2], s0[3]};
    for (std::size_t t = 0; t < tr.length(); ++t) {
        if (!oracle::cart_valid(c)) return false;
        c = oracle::cartpole(c, static_cast<int>(tr.actions[t].index));
        const auto& s = tr.states[t + 1];
        if (std::abs(s[0] - c.x) + std::abs(s[1] - c.xd) + std::abs(s[2] - c.th) + std::abs(s[3] - c.thd) > 1e-9)
            return false;
    }
    return true;
}

Outcome approx_control() {
    const auto env = make_cartpole(CostKind::reward, 0.8);
    int full = 0;
    std::string steps;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        ControlConfig cfg;
        cfg.seed = seed;
        cfg.poly.degree = 2;
        const auto ep = run_approx(env, sample_initial_state(seed, 4, 0.05), cfg);
        const bool ok = ep.steps == 500 && ep.cum_reward == 500.0 && replay_valid(ep.trajectory);
        full += ok ? 1 : 0;
        steps += (seed ? "," : "") + std::to_string(ep.steps);
    }
    return {full >= 4, std::to_string(full) + "/5 seeds reach 500 steps (steps " + steps + ")"};
}

Outcome exact_control() {
    std::size_t best = 0;
    std::string detail;
    for (double gamma : {0.5, 0.8})
        for (CostKind cost : {CostKind::quadratic, CostKind::reward}) {
            const auto env = make_cartpole(cost, gamma);
            ControlConfig cfg;
            cfg.fs_order = 10;
            cfg.prefix = 10;
            const auto ep = run_exact(env, sample_initial_state(0, 4, 0.05), cfg);
            best = std::max(best, replay_valid(ep.trajectory) ? ep.steps : 0);
            detail += (detail.empty() ? "" : ",") + std::to_string(ep.steps);
        }
    return {best >= 10, "steps per (gamma, cost) config: " + detail};
}

Outcome codec_bounds() {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> len(1, 80);
    double worst = 0.0;
    bool ok = true;
    const unsigned bases[] = {2, 4, 8};
    for (int k = 0; k < 100000; ++k) {
        const unsigned m = bases[k % 3];
        const auto l = random_string(rng, len(rng), m);
        const double v = l.value();
        ok = ok && v >= 0.0 && v < 1.0;
        const long double exact = oracle::digits_value(digits_of(l, l.size()), m);
        worst = std::max(worst, static_cast<double>(std::abs(static_cast<long double>(v) - exact)));
        const auto [head, tail] = shift(l);
        ok = ok && compose(head, tail) == l && head.index == l.digit(0);
        std::vector<ActionCode> codes;
        for (std::size_t i = 0; i < l.size(); ++i) codes.push_back(make_code(l.digit(i), m));
        ok = ok && encode(codes, m) == l && decode_prefix(l, l.size()).codes == codes;
        const auto tail2 = random_string(rng, len(rng) % 8, m);
        auto joined = concat(l, tail2);
        for (std::size_t i = 0; i < l.size(); ++i) joined = shift(joined).second;
        ok = ok && joined == tail2;
    }
    const auto top = LifeValue::all_max(8, 100);
    ok = ok && top.value() < 1.0 && worst <= 2.3e-16;
    return {ok, "1e5 strings in [0,1), round trips exact, projection error " + fmt(worst)};
}

Outcome recursion() {
    std::mt19937_64 rng(12);
    const auto cyc = cycle_mdp(8, 0.5);
    double worst_cycle = 0.0, worst_oracle = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto l = random_string(rng, 64);
        const unsigned x = k % 8;
        worst_cycle = std::max(worst_cycle, theorem1_residual(cyc, l, {double(x)}, 60));
        // same identity from the longhand cycle sums
        const auto d = digits_of(l, 62);
        const std::vector<unsigned> tail(d.begin() + 1, d.end());
        const double lhs = oracle::cycle_sum(8, x, d, 0.5, 60);
        const double rhs = x + 0.5 * oracle::cycle_sum(8, (x + 1 + d[0]) % 8, tail, 0.5, 59);
        worst_oracle = std::max(worst_oracle, std::abs(lhs - rhs));
    }
    const auto cart = make_cartpole(CostKind::reward, 0.8);
    const double bound = 2.0 * std::pow(0.8, 80) * cart.g_max() / 0.2;
    std::uniform_real_distribution<double> ux(-2.4, 2.4), uv(-2.0, 2.0), ut(-0.2, 0.2);
    double worst_cart = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const State x{ux(rng), uv(rng), ut(rng), uv(rng)};
        worst_cart = std::max(worst_cart, theorem1_residual(cart, random_string(rng, 84), x, 80));
    }
    const bool ok = worst_cycle < 1e-12 && worst_oracle < 1e-12 && worst_cart < 1e-6 && worst_cart <= bound;
    return {ok, "cycle " + fmt(worst_cycle) + " (oracle " + fmt(worst_oracle) + "), cartpole " + fmt(worst_cart) +
                    " vs bound " + fmt(bound)};
}

Outcome transform() {
    std::mt19937_64 rng(13);
    const auto cyc = cycle_mdp(5, 0.5);
    const TruncatedEvaluator base(cyc, {0.0}, 100);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        std::vector<ActionCode> acts;
        for (int i = 0; i < 1 + k % 5; ++i) acts.push_back(make_code(rng() % 2, 2));
        const auto traj = rollout(cyc, {0.0}, acts);
        const auto p = params_from_trajectory(traj, 0.5, 2);
        const auto l = random_string(rng, 100);
        const auto xn = static_cast<unsigned>(traj.states.back()[0]);
        const double direct = oracle::cycle_sum(5, xn, digits_of(l, 100), 0.5, 90);
        worst = std::max(worst, std::abs(apply_transform(base, p, 0.5, l) - direct));
    }
    const RealFunctionRep smooth([](double l) { return std::sin(3.0 * l) + 0.5 * l * l; }, 2);
    const TransformParams planted{2, 0.3, 0.2, 2.0, std::nullopt};
    const TransformedRep target(smooth, planted, 0.8);
    const auto fit = fit_params(smooth, target, 0.8, {});
    const double dpsi = std::abs(fit.chosen.psi - planted.psi), dphi = std::abs(fit.chosen.phi - planted.phi);
    const bool ok = worst < 1e-9 && dpsi < 1e-6 && dphi < 1e-6;
    return {ok, "round trip " + fmt(worst) + ", fit |dpsi| " + fmt(dpsi) + " |dphi| " + fmt(dphi) + " N " +
                    fmt(fit.chosen.steps)};
}

Outcome policy_life() {
    const auto two = finite_mdp({{1, 1}, {0, 0}}, {{0, 0}, {0, 0}}, 0.5, "two_state");
    const auto v = solve(build_system(two, {make_code(1, 2), make_code(0, 2)}));
    const double fixture_err = std::max(std::abs(v.values[0] - 2.0 / 3.0), std::abs(v.values[1] - 1.0 / 3.0));

    std::mt19937_64 rng(14);
    const auto cyc = cycle_mdp(8, 0.5);
    double worst = 0.0;
    for (int p = 0; p < 20; ++p) {
        std::vector<unsigned> pol(8);
        for (auto& a : pol) a = rng() % 2;
        std::vector<ActionCode> codes;
        for (unsigned a : pol) codes.push_back(make_code(a, 2));
        const auto vals = solve(build_system(cyc, codes));
        for (unsigned x0 = 0; x0 < 8; ++x0) {
            // rollout-encoded 40-digit prefix under the policy
            std::vector<unsigned> d;
            unsigned x = x0;
            for (int k = 0; k < 40; ++k) {
                d.push_back(pol[x]);
                x = (x + 1 + pol[x]) % 8;
            }
            worst = std::max(worst, std::abs(vals.values[x0] - static_cast<double>(oracle::digits_value(d, 2))));
        }
    }
    const bool ok = fixture_err <= 1e-12 && worst <= std::ldexp(1.0, -40) + 1e-12;
    return {ok, "fixture error " + fmt(fixture_err) + ", random policies " + fmt(worst)};
}

Outcome tabular() {
    const auto cyc = cycle_mdp(3, 0.5);
    const auto sol = solve_tabular(make_tabular(cyc, 10), 0.5);
    const double tail = std::pow(0.5, 10) * cyc.g_max() / 0.5;
    bool ok = sol.stop_reason == "converged";
    double worst = 0.0;
    for (unsigned x = 0; x < 3; ++x) {
        double table_min = 1e300;
        for (std::size_t k = 0; k < sol.score.grid_size(); ++k) table_min = std::min(table_min, sol.score.at(x, k));
        const double e = oracle::cycle_enum_min(3, x, 0.5, 10);
        ok = ok && table_min >= e - 1e-12 && table_min <= e + tail + 1e-12;
        worst = std::max(worst, table_min - e);
    }
    double ratio = 0.0;
    for (std::size_t k = 1; k < sol.deltas.size(); ++k)
        if (sol.deltas[k - 1] > 0) ratio = std::max(ratio, sol.deltas[k] / sol.deltas[k - 1]);
    ok = ok && ratio <= 0.5 + 1e-12;
    return {ok, "table min - enumeration " + fmt(worst) + " (tail " + fmt(tail) + "), max delta ratio " + fmt(ratio)};
}

Outcome fs_interpolation() {
    const auto cyc = cycle_mdp(3, 0.5);
    const auto cart = make_cartpole(CostKind::quadratic, 0.5);
    const TruncatedEvaluator e1(cyc, {0.0});
    const TruncatedEvaluator e2(cart, {0, 0, 0, 0});
    double worst = 0.0;
    for (const ScoreLifeRep* e : {static_cast<const ScoreLifeRep*>(&e1), static_cast<const ScoreLifeRep*>(&e2)})
        for (unsigned n = 0; n <= 10; ++n) {
            const auto rep = fit_fs(*e, {}, n);
            for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
                const auto l = LifeValue::from_dyadic(k, n, 2);
                worst = std::max(worst, std::abs(rep.reconstruct(l.value()) - e->at(l)));
            }
        }
    return {worst <= 1e-12, "worst dyadic-point error " + fmt(worst)};
}

Outcome polynomial() {
    const RealFunctionRep quad([](double l) { return 1.5 - 2.0 * l + 3.0 * l * l; }, 2);
    PolyFitConfig cfg;
    cfg.n_samples = 10;
    const auto q = fit_poly(quad, {}, cfg);
    const double coef_err =
        std::max({std::abs(q.coeffs()[0] - 1.5), std::abs(q.coeffs()[1] + 2.0), std::abs(q.coeffs()[2] - 3.0)});

    const auto env = make_cartpole(CostKind::quadratic, 0.5);
    const TruncatedEvaluator e(env, {-0.0039, -0.3902, 0.0058, 0.5853});
    PolyFitConfig c5;
    c5.degree = 5;
    const auto p = fit_poly(e, e.state(), c5);
    const double closed = poly_min(p).value;
    double grid = 1e300;
    for (int k = 0; k < 1000000; ++k) grid = std::min(grid, p.eval(k / 1e6));
    double lo = 1e300, hi = -1e300;
    for (std::uint64_t k = 0; k < 1024; ++k) {
        const double s = e.at(LifeValue::from_dyadic(k, 10, 2));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const double gap = std::abs(closed - lo);
    const bool ok = coef_err <= 1e-10 && std::abs(closed - grid) <= 1e-8 && gap <= 0.05 * (hi - lo);
    return {ok, "coefficient error " + fmt(coef_err) + ", closed form vs grid " + fmt(std::abs(closed - grid)) +
                    ", |poly min - grid min| " + fmt(gap) + " vs " + fmt(0.05 * (hi - lo))};
}

Outcome variation() {
    std::vector<double> tv;
    for (double g : {0.5, 0.6, 0.7, 0.8}) {
        const TruncatedEvaluator e(make_cartpole(CostKind::quadratic, g), {0, 0, 0, 0});
        tv.push_back(total_variation(sample_curve(e, 1024, Sampling::uniform, 0)));
    }
    bool ok = true;
    std::string detail = "total variation";
    for (std::size_t k = 0; k < tv.size(); ++k) {
        if (k) ok = ok && tv[k] > tv[k - 1];
        detail += " " + fmt(tv[k]);
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"cartpole approximate control", approx_control},
        {"exact method sanity", exact_control},
        {"life value bounds and round trips", codec_bounds},
        {"Score-life recursion residual", recursion},
        {"state transform round trip and fit", transform},
        {"policy life values", policy_life},
        {"tabular sweep vs enumeration", tabular},
        {"Faber-Schauder interpolation", fs_interpolation},
        {"polynomial method", polynomial},
        {"sampled curve variation grows with gamma", variation},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s: %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.passed ? 0 : 1;
    }
    return failures ? 1 : 0;
}
