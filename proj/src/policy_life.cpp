#include "scorelife/policy_life.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>

#include <Eigen/SparseLU>

namespace scorelife {

namespace {

constexpr std::size_t kDirectLimit = 10000;

}  // namespace

PolicyLifeSystem build_system(const EnvModel& env, const std::vector<State>& states,
                              const std::vector<ActionCode>& policy) {
    if (states.size() != policy.size()) throw EnvError("policy must assign an action to every state");
    const unsigned base = env.num_actions();
    std::map<State, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i], i);

    PolicyLifeSystem sys;
    sys.base = base;
    sys.policy = policy;
    sys.successor.resize(states.size());
    sys.C.resize(static_cast<Eigen::Index>(states.size()));
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(states.size());
    const double w = 1.0 / base;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (policy[i].base != base || policy[i].index >= base) throw EnvError("policy action code invalid");
        const auto it = index.find(env.next(states[i], policy[i].index));
        if (it == index.end())
            throw EnvError("successor of state " + std::to_string(i) + " is outside the state list");
        sys.successor[i] = it->second;
        entries.emplace_back(static_cast<int>(i), static_cast<int>(it->second), w);
        sys.C[static_cast<Eigen::Index>(i)] = w * policy[i].index;
    }
    const auto n = static_cast<Eigen::Index>(states.size());
    sys.A.resize(n, n);
    sys.A.setFromTriplets(entries.begin(), entries.end());
    return sys;
}

PolicyLifeSystem build_system(const EnvModel& env, const std::vector<ActionCode>& policy) {
    const auto n = env.finite_states();
    if (!n) throw EnvError("build_system without a state list needs a finite environment");
    std::vector<State> states;
    for (std::size_t i = 0; i < *n; ++i) states.push_back(env.finite_state(i));
    return build_system(env, states, policy);
}

PolicyLifeValues solve(const PolicyLifeSystem& sys, SolveMethod method) {
    const auto n = static_cast<Eigen::Index>(sys.size());
    const bool iterative =
        method == SolveMethod::iterative || (method == SolveMethod::automatic && sys.size() > kDirectLimit);
    Eigen::VectorXd L;
    if (iterative) {
        // ||A||_inf = 1/M, so the error shrinks by at least 1/2 per pass.
        L = Eigen::VectorXd::Zero(n);
        for (int it = 0; it < 200; ++it) {
            Eigen::VectorXd next = sys.A * L + sys.C;
            const double step = (next - L).lpNorm<Eigen::Infinity>();
            L = std::move(next);
            if (step < 1e-16) break;
        }
    } else {
        Eigen::SparseMatrix<double> I(n, n);
        I.setIdentity();
        Eigen::SparseMatrix<double> system = I - sys.A;
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(system);
        assert(lu.info() == Eigen::Success);
        L = lu.solve(sys.C);
    }

    PolicyLifeValues out;
    out.iterative = iterative;
    out.residual = (L - sys.A * L - sys.C).lpNorm<Eigen::Infinity>();

    // Greatest set of states whose policy stream is M-1 forever.
    std::vector<bool> boundary(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) boundary[i] = sys.policy[i].index == sys.base - 1;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < sys.size(); ++i)
            if (boundary[i] && !boundary[sys.successor[i]]) {
                boundary[i] = false;
                changed = true;
            }
    }

    out.values.resize(sys.size());
    out.boundary = boundary;
    for (std::size_t i = 0; i < sys.size(); ++i)
        out.values[i] = boundary[i] ? 1.0 : std::clamp(L[static_cast<Eigen::Index>(i)], 0.0, 1.0);
    return out;
}

double verify_against_rollout(const PolicyLifeSystem& sys, const PolicyLifeValues& values, std::size_t n) {
    double worst = 0.0;
    std::vector<ActionCode> stream(n);
    for (std::size_t i = 0; i < sys.size(); ++i) {
        std::size_t x = i;
        for (std::size_t k = 0; k < n; ++k) {
            stream[k] = sys.policy[x];
            x = sys.successor[x];
        }
        const double encoded = encode(stream, sys.base).value();
        worst = std::max(worst, std::abs(values.values[i] - encoded));
    }
    return worst;
}

}  // namespace scorelife
