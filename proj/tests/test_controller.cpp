#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "scorelife/controller.hpp"
#include "scorelife/rollout.hpp"

using namespace scorelife;

namespace {

ControlConfig small(std::size_t cap) {
    ControlConfig c;
    c.episode_cap = cap;
    c.fs_order = 8;
    c.opt.restarts = 4;
    c.opt.prescan_depth = 8;
    c.poly.n_samples = 60;
    return c;
}

std::vector<std::string> csv_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("constant cost environment runs to the cap with both methods") {
    const auto env = constant_cost_env(1.0, 0.5);
    const auto cfg = small(23);
    const auto ex = run_exact(env, {0.0}, cfg);
    const auto ap = run_approx(env, {0.0}, cfg);
    CHECK(ex.steps == 23);
    CHECK(ap.steps == 23);
    CHECK(ex.cum_reward == -23.0);
    CHECK(ap.cum_reward == ex.cum_reward);
    CHECK(ex.replans == (23 + cfg.prefix - 1) / cfg.prefix);
    CHECK(ap.replans == 23);
    CHECK_FALSE(ex.trajectory.terminated);
    CHECK(ex.method == "exact");
    CHECK(ap.method == "approx");
}

TEST_CASE("exact method executes plan prefixes") {
    const auto env = cycle_mdp(3, 0.5);
    for (std::size_t prefix : {1u, 3u, 10u}) {
        auto cfg = small(25);
        cfg.prefix = prefix;
        const auto ep = run_exact(env, {0.0}, cfg);
        CHECK(ep.steps == 25);
        CHECK(ep.replans == (25 + prefix - 1) / prefix);
        REQUIRE(ep.plans.size() == ep.replans);
        REQUIRE(ep.plan_seeds.size() == ep.replans);
        std::vector<unsigned> expected;
        for (const auto& plan : ep.plans)
            for (const auto& c : decode_prefix(plan, prefix).codes) expected.push_back(c.index);
        expected.resize(ep.steps);
        std::vector<unsigned> got;
        for (const auto& a : ep.trajectory.actions) got.push_back(a.index);
        CHECK(got == expected);
        for (std::size_t t = 0; t < ep.steps; ++t) CHECK(ep.replan_id[t] == t / prefix);
        CHECK(ep.events.empty());
        // replaying the actions reproduces the recorded trajectory
        const auto replay = rollout(env, {0.0}, ep.trajectory.actions);
        CHECK(replay.states == ep.trajectory.states);
        CHECK(replay.costs == ep.trajectory.costs);
    }
}

TEST_CASE("episodes are deterministic and the reward is the cost sum") {
    const auto env = make_cartpole(CostKind::quadratic, 0.8);
    const auto cfg = small(12);
    const State x0 = sample_initial_state(3, 4, 0.05);
    for (int method = 0; method < 2; ++method) {
        const auto a = method ? run_approx(env, x0, cfg) : run_exact(env, x0, cfg);
        const auto b = method ? run_approx(env, x0, cfg) : run_exact(env, x0, cfg);
        CHECK(a.trajectory.states == b.trajectory.states);
        CHECK(a.plan_seeds == b.plan_seeds);
        double sum = 0.0;
        for (std::size_t t = 0; t < a.steps; ++t) {
            const auto& s = a.trajectory.states[t];
            sum += oracle::quad_cost({s[0], s[1], s[2], s[3]});
        }
        CHECK(a.cum_reward == doctest::Approx(-sum).epsilon(1e-12));
        CHECK(a.fit_ms.size() == a.steps);
        CHECK(a.opt_ms.size() == a.steps);
    }
}

TEST_CASE("approximate method matches the brute-force policy on cycle(3)") {
    const auto env = cycle_mdp(3, 0.5);
    const auto opt = oracle::cycle_optimal(3, 0.5);
    ControlConfig cfg = small(12);
    cfg.horizon = 60;
    for (bool transform : {false, true}) {
        cfg.transform_successors = transform;
        const auto ep = run_approx(env, {0.0}, cfg);
        REQUIRE(ep.steps == 12);
        for (std::size_t t = 0; t < ep.steps; ++t) {
            const State& x = ep.trajectory.states[t];
            unsigned best = 0;
            double best_q = 1e300;
            for (unsigned a = 0; a < 2; ++a) {
                const double q = env.stage_cost(x, a) + 0.5 * opt[std::size_t(env.next(x, a)[0])];
                if (q < best_q - 1e-12) best_q = q, best = a;
            }
            CHECK(ep.trajectory.actions[t].index == best);
        }
    }
}

TEST_CASE("liveness stops the episode") {
    const auto env = cycle_mdp(3, 0.5);
    auto cfg = small(100);
    // the optimal policy moves 0 -> 1 first
    const AliveFn not_one = [](const State& s) { return s[0] != 1.0; };
    const auto ep = run_approx(env, {0.0}, cfg, not_one);
    CHECK(ep.trajectory.terminated);
    CHECK(ep.trajectory.states.back()[0] == 1.0);
    CHECK(ep.steps == 1);

    const auto reward = make_cartpole(CostKind::reward, 0.8);
    const auto alive = default_alive(reward);
    CHECK(alive({0, 0, 0, 0}));
    CHECK_FALSE(alive({0, 0, 0.3, 0}));
    const auto dead = run_exact(reward, {0, 0, 0.3, 0}, cfg);
    CHECK(dead.steps == 0);
    CHECK(dead.trajectory.terminated);

    cfg.prefix = 0;
    CHECK_THROWS(run_exact(env, {0.0}, cfg));
}

TEST_CASE("sample_initial_state") {
    const auto a = sample_initial_state(7, 4, 0.05);
    CHECK(a == sample_initial_state(7, 4, 0.05));
    CHECK_FALSE(a == sample_initial_state(8, 4, 0.05));
    for (double v : a) CHECK(std::abs(v) <= 0.05);
}

TEST_CASE("compare_methods and CSV output") {
    const auto env = constant_cost_env(2.0, 0.5);
    const auto cfg = small(5);
    const auto cmp = compare_methods(env, {{0.0}, {0.0}}, cfg);
    REQUIRE(cmp.exact.size() == 2);
    REQUIRE(cmp.approx.size() == 2);
    CHECK(cmp.exact[1].seed == cfg.seed + 1);
    CHECK(cmp.exact[0].cum_reward == cmp.approx[0].cum_reward);

    std::ostringstream out;
    write_control_csv(out, cmp.exact);
    const auto lines = csv_lines(out.str());
    REQUIRE(lines.size() == 11);
    CHECK(lines[0] == "seed,method,t,action,stage_cost,cum_reward,replan_id,fit_ms,opt_ms");
    CHECK(lines[1].rfind("0,exact,0,", 0) == 0);
    CHECK(lines[1].find(",2,-2,0,") != std::string::npos);
    CHECK(lines[5].rfind("0,exact,4,", 0) == 0);
    CHECK(lines[5].find(",2,-10,0,") != std::string::npos);
    CHECK(lines[6].rfind("1,exact,0,", 0) == 0);

    std::ostringstream tr;
    write_trajectory_csv(tr, cmp.exact[0].trajectory);
    const auto tl = csv_lines(tr.str());
    REQUIRE(tl.size() == 7);
    CHECK(tl[0] == "t,x,xdot,theta,thetadot,action,stage_cost,cum_reward");
}
