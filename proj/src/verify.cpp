#include "scorelife/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "scorelife/faber_schauder.hpp"
#include "scorelife/plot.hpp"
#include "scorelife/policy_life.hpp"
#include "scorelife/poly_approx.hpp"
#include "scorelife/transform.hpp"

namespace scorelife {

namespace {

using Rng = std::mt19937_64;

LifeValue random_string(Rng& rng, unsigned base, std::size_t depth) {
    std::uniform_int_distribution<unsigned> digit(0, base - 1);
    std::vector<std::uint8_t> d(depth);
    for (auto& v : d) v = static_cast<std::uint8_t>(digit(rng));
    return {base, std::move(d)};
}

std::vector<ActionCode> random_actions(Rng& rng, unsigned base, std::size_t n) {
    std::uniform_int_distribution<unsigned> digit(0, base - 1);
    std::vector<ActionCode> a;
    for (std::size_t i = 0; i < n; ++i) a.push_back(make_code(digit(rng), base));
    return a;
}

CheckResult make(std::string name, double measured, double threshold, std::string detail = {}) {
    return {std::move(name), measured <= threshold, measured, threshold, std::move(detail)};
}

CheckResult codec_bounds(const VerifyOptions& o) {
    Rng rng(o.seed);
    const unsigned bases[] = {2, 4, 8};
    std::uniform_int_distribution<std::size_t> len(1, 64);
    std::size_t failures = 0;
    for (std::size_t s = 0; s < o.strings; ++s) {
        const unsigned m = bases[s % 3];
        const auto l = random_string(rng, m, len(rng));
        const double v = l.value();
        const bool all_max = std::all_of(l.digits().begin(), l.digits().end(), [&](auto d) { return d == m - 1; });
        const double cap = 1.0 - std::pow(static_cast<double>(m), -static_cast<double>(l.size()));
        bool ok = v >= 0.0 && v < 1.0 && (all_max ? v <= cap : v < cap || cap == 1.0);
        std::vector<ActionCode> codes;
        for (auto d : l.digits()) codes.push_back(make_code(d, m));
        ok = ok && encode(codes, m) == l && decode_prefix(l, l.size(), PadPolicy::strict).codes == codes;
        const auto [head, tail] = o.shift_fn(l);
        ok = ok && compose(head, tail) == l && tail.size() + 1 == l.size();
        failures += ok ? 0 : 1;
    }
    return make("codec_bounds", static_cast<double>(failures), 0.0,
                std::to_string(o.strings) + " strings over M in {2,4,8}; counts failures");
}

CheckResult recursion(const std::string& name, const EnvModel& env, const std::vector<State>& xs, std::size_t n,
                     const VerifyOptions& o) {
    Rng rng(o.seed + 1);
    double worst = 0.0;
    for (std::size_t p = 0; p < o.pairs; ++p) {
        const auto l = random_string(rng, env.num_actions(), n + 2);
        worst = std::max(worst, theorem1_residual(env, l, xs[p % xs.size()], n, o.shift_fn));
    }
    const double bound = 2.0 * std::pow(env.gamma(), static_cast<double>(n)) * env.g_max() / (1.0 - env.gamma());
    return make(name, worst, std::max(bound, 1e-12), "n = " + std::to_string(n));
}

CheckResult transform_roundtrip(const VerifyOptions& o) {
    Rng rng(o.seed + 2);
    const auto env = cycle_mdp(3, 0.5);
    constexpr std::size_t horizon = 60;
    std::uniform_int_distribution<std::size_t> len(0, 8), start(0, 2);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const State x0 = env.finite_state(start(rng));
        const auto traj = rollout(env, x0, random_actions(rng, 2, len(rng)));
        const auto p = params_from_trajectory(traj, env.gamma(), 2);
        const TruncatedEvaluator base(env, x0, horizon + traj.length());
        for (int k = 0; k < 50; ++k) {
            const auto l = random_string(rng, 2, horizon + 1);
            const double direct = eval(env, l, traj.states.back(), horizon);
            worst = std::max(worst, std::abs(apply_transform(base, p, env.gamma(), l) - direct));
        }
    }
    return make("transform_roundtrip", worst, 1e-9, "cycle_mdp(3), 10 trajectories x 50 life values");
}

CheckResult transform_composition(const VerifyOptions& o) {
    Rng rng(o.seed + 3);
    const auto env = cycle_mdp(5, 0.7);
    std::uniform_int_distribution<std::size_t> len(0, 12);
    double worst = 0.0;
    bool digits_ok = true;
    for (int t = 0; t < 200; ++t) {
        const auto a = random_actions(rng, 2, len(rng));
        const auto b = random_actions(rng, 2, len(rng));
        std::vector<ActionCode> ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        const State x0{0.0};
        const auto ta = rollout(env, x0, a);
        const auto tb = rollout(env, ta.states.back(), b);
        const auto pa = params_from_trajectory(ta, env.gamma(), 2);
        const auto pb = params_from_trajectory(tb, env.gamma(), 2);
        const auto pab = params_from_trajectory(rollout(env, x0, ab), env.gamma(), 2);
        const auto c = compose_params(pa, pb, env.gamma());
        digits_ok = digits_ok && c.phi_digits && *c.phi_digits == *pab.phi_digits && c.steps == pab.steps;
        worst = std::max(worst, std::abs(c.psi - pab.psi));
    }
    auto r = make("transform_composition", digits_ok ? worst : std::numeric_limits<double>::infinity(), 1e-12,
                  "psi error of composed parameters; phase compared digit by digit");
    return r;
}

CheckResult transform_fit(const VerifyOptions& o) {
    // Smooth base so the planted parameters are identifiable from 16 samples.
    const RealFunctionRep base([](double l) { return std::sin(3.0 * l) + 0.5 * l * l; }, 2);
    TransformParams planted{2, 0.3, 0.2, 2.0, std::nullopt};
    const double gamma = 0.8;
    const TransformedRep target(base, planted, gamma);
    TransformFitConfig cfg;
    cfg.seed = o.seed;
    const auto fit = fit_params(base, target, gamma, cfg);
    const double err = std::max({std::abs(fit.chosen.psi - planted.psi), std::abs(fit.chosen.phi - planted.phi),
                                 std::abs(fit.chosen.steps - planted.steps) * 1e-3});
    return make("transform_fit", err, 1e-6, "planted (phi, psi, N) = (0.3, 0.2, 2); N error scaled by 1e-3");
}

CheckResult policy_fixture() {
    const auto env = finite_mdp({{1, 1}, {0, 0}}, {{0, 0}, {0, 0}}, 0.5, "two_state");
    const auto sys = build_system(env, {make_code(1, 2), make_code(0, 2)});
    const auto vals = solve(sys);
    const double err = std::max(std::abs(vals.values[0] - 2.0 / 3.0), std::abs(vals.values[1] - 1.0 / 3.0));
    return make("policy_life_fixture", err, 1e-12, "two-state example, expected [2/3, 1/3]");
}

CheckResult policy_random(const VerifyOptions& o) {
    Rng rng(o.seed + 4);
    const auto env = cycle_mdp(8, 0.5);
    double worst = 0.0, residual = 0.0;
    for (int p = 0; p < 20; ++p) {
        const auto sys = build_system(env, random_actions(rng, 2, 8));
        const auto vals = solve(sys);
        residual = std::max(residual, vals.residual);
        worst = std::max(worst, verify_against_rollout(sys, vals, 40));
    }
    return make("policy_life_random", worst, std::ldexp(1.0, -40) + 1e-12,
                "20 random policies on cycle_mdp(8), 40-digit prefixes; max solve residual " + std::to_string(residual));
}

CheckResult tabular_oracle() {
    const auto env = cycle_mdp(3, 0.5);
    constexpr unsigned depth = 10;
    const auto sol = solve_tabular(make_tabular(env, depth), env.gamma());
    const double tail = std::pow(env.gamma(), depth) * env.g_max() / (1.0 - env.gamma());
    double worst = 0.0;
    for (std::size_t x = 0; x < 3; ++x) {
        double enum_min = std::numeric_limits<double>::infinity();
        for (std::uint64_t k = 0; k < (1u << depth); ++k)
            enum_min = std::min(enum_min, eval(env, LifeValue::from_dyadic(k, depth, 2), env.finite_state(x), depth - 1));
        double table_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < sol.score.grid_size(); ++k) table_min = std::min(table_min, sol.score.at(x, k));
        const double below = enum_min - table_min;
        const double above = table_min - (enum_min + tail);
        worst = std::max({worst, below, above});
    }
    double ratio = 0.0;
    for (std::size_t k = 1; k < sol.deltas.size(); ++k)
        if (sol.deltas[k - 1] > 1e-300) ratio = std::max(ratio, sol.deltas[k] / sol.deltas[k - 1]);
    auto r = make("tabular_oracle", worst, 1e-12,
                  "cycle_mdp(3), depth 10; max delta ratio " + std::to_string(ratio) + ", stop " + sol.stop_reason);
    r.passed = r.passed && ratio <= env.gamma() + 1e-9;
    return r;
}

CheckResult fs_interpolation() {
    const auto cyc = cycle_mdp(3, 0.5);
    const auto cart = make_cartpole(CostKind::quadratic, 0.5);
    const TruncatedEvaluator e1(cyc, {0.0}, 60);
    const TruncatedEvaluator e2(cart, {0.0, 0.0, 0.0, 0.0}, 40);
    double worst = 0.0;
    for (const ScoreLifeRep* e : {static_cast<const ScoreLifeRep*>(&e1), static_cast<const ScoreLifeRep*>(&e2)})
        for (unsigned n = 0; n <= 10; ++n) {
            const auto rep = fit_fs(*e, {}, n);
            for (std::uint64_t k = 0; k < (1u << n); ++k) {
                const auto l = LifeValue::from_dyadic(k, n, 2);
                worst = std::max(worst, std::abs(rep.reconstruct(l.value()) - e->at(l)));
            }
        }
    return make("fs_interpolation", worst, 1e-12, "orders 0..10 on cycle_mdp(3) and cartpole evaluators");
}

CheckResult poly_checks(const VerifyOptions& o) {
    const RealFunctionRep quad([](double l) { return 1.5 - 2.0 * l + 3.0 * l * l; }, 2);
    PolyFitConfig cfg;
    cfg.n_samples = 10;
    cfg.seed = o.seed;
    const auto rep = fit_poly(quad, {}, cfg);
    const double err = std::max({std::abs(rep.coeffs()[0] - 1.5), std::abs(rep.coeffs()[1] + 2.0),
                                 std::abs(rep.coeffs()[2] - 3.0)});

    const auto env = make_cartpole(CostKind::quadratic, 0.5);
    const TruncatedEvaluator eval_ref(env, {-0.0039, -0.3902, 0.0058, 0.5853});
    PolyFitConfig c5;
    c5.degree = 5;
    c5.seed = o.seed;
    const auto p5 = fit_poly(eval_ref, eval_ref.state(), c5);
    const double analytic = poly_min(p5).value;
    double grid = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 1000000; ++k) grid = std::min(grid, p5.eval(static_cast<double>(k) / 1e6));
    auto r = make("poly_checks", std::max(err / 1e-10, std::abs(analytic - grid) / 1e-8), 1.0,
                  "quadratic recovery error / 1e-10 and degree-5 minimum vs 1e6-point grid / 1e-8");
    return r;
}

CheckResult variation_growth(const VerifyOptions& o) {
    std::vector<double> tv;
    for (double g : {0.5, 0.6, 0.7, 0.8}) {
        const TruncatedEvaluator e(make_cartpole(CostKind::quadratic, g), {0.0, 0.0, 0.0, 0.0});
        tv.push_back(total_variation(sample_curve(e, 1024, Sampling::uniform, o.seed)));
    }
    bool increasing = true;
    for (std::size_t k = 1; k < tv.size(); ++k) increasing = increasing && tv[k] > tv[k - 1];
    std::string detail = "total variation at gamma 0.5..0.8:";
    for (double v : tv) detail += " " + std::to_string(v);
    return {"variation_growth", increasing, increasing ? 0.0 : 1.0, 0.0, detail};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& o) {
    std::vector<CheckResult> out;
    auto guarded = [&](const std::string& name, auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::numeric_limits<double>::infinity(), 0.0, std::string("threw: ") + e.what()});
        }
    };
    guarded("codec_bounds", [&] { return codec_bounds(o); });
    std::vector<State> cyc_states;
    for (std::size_t x = 0; x < 8; ++x) cyc_states.push_back({static_cast<double>(x)});
    guarded("recursion_cycle", [&] { return recursion("recursion_cycle", cycle_mdp(8, 0.5), cyc_states, 60, o); });
    guarded("recursion_cartpole", [&] {
        Rng rng(o.seed + 5);
        std::uniform_real_distribution<double> ux(-2.4, 2.4), uv(-2.0, 2.0), ut(-0.2, 0.2);
        std::vector<State> xs;
        for (int k = 0; k < 64; ++k) xs.push_back({ux(rng), uv(rng), ut(rng), uv(rng)});
        return recursion("recursion_cartpole", make_cartpole(CostKind::reward, 0.8), xs, 80, o);
    });
    guarded("transform_roundtrip", [&] { return transform_roundtrip(o); });
    guarded("transform_composition", [&] { return transform_composition(o); });
    guarded("transform_fit", [&] { return transform_fit(o); });
    guarded("policy_life_fixture", [&] { return policy_fixture(); });
    guarded("policy_life_random", [&] { return policy_random(o); });
    guarded("tabular_oracle", [&] { return tabular_oracle(); });
    guarded("fs_interpolation", [&] { return fs_interpolation(); });
    guarded("poly_checks", [&] { return poly_checks(o); });
    guarded("variation_growth", [&] { return variation_growth(o); });
    return out;
}

bool all_passed(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

nlohmann::json report_json(const std::vector<CheckResult>& checks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json j{{"name", c.name}, {"passed", c.passed}, {"threshold", c.threshold}, {"detail", c.detail}};
        j["measured"] = std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json(nullptr);
        arr.push_back(std::move(j));
    }
    return {{"passed", all_passed(checks)}, {"checks", arr}};
}

}  // namespace scorelife
