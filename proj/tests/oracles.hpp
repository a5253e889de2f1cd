#pragma once

// Independent reference implementations used only by the tests.  None of
// them call into the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

// sum_i d_i M^-(i+1) accumulated in long double, most significant digit first.
inline long double digits_value(const std::vector<unsigned>& d, unsigned m) {
    long double v = 0.0L, scale = 1.0L / m;
    for (unsigned x : d) {
        v += x * scale;
        scale /= m;
    }
    return v;
}

struct Cart {
    double x, xd, th, thd;
};

// One Euler step of the Gym cartpole equations, written out longhand.
inline Cart cartpole(const Cart& s, int action) {
    const double g = 9.8, mc = 1.0, mp = 0.1, len = 0.5, tau = 0.02;
    const double total = mc + mp, pml = mp * len;
    const double f = action == 1 ? 10.0 : -10.0;
    const double c = std::cos(s.th), sn = std::sin(s.th);
    const double tmp = (f + pml * s.thd * s.thd * sn) / total;
    const double thacc = (g * sn - c * tmp) / (len * (4.0 / 3.0 - mp * c * c / total));
    const double xacc = tmp - pml * thacc * c / total;
    return {s.x + tau * s.xd, s.xd + tau * xacc, s.th + tau * s.thd, s.thd + tau * thacc};
}

inline double quad_cost(const Cart& s) { return 2 * s.x * s.x + s.xd * s.xd + 8 * s.th * s.th + s.thd * s.thd; }

inline bool cart_valid(const Cart& s) { return std::abs(s.x) <= 2.4 && std::abs(s.th) <= 12.0 * M_PI / 180.0; }

// sum_{k=0}^{n} gamma^k g for the quadratic cartpole cost (no termination).
inline double cartpole_quadratic_sum(Cart s, const std::vector<int>& actions, double gamma, std::size_t n) {
    double total = 0.0, w = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
        total += w * quad_cost(s);
        s = cartpole(s, k < actions.size() ? actions[k] : 0);
        w *= gamma;
    }
    return total;
}

// Cycle MDP: x -> (x + 1 + a) mod n, cost x.
inline double cycle_sum(unsigned n_states, unsigned x, const std::vector<unsigned>& actions, double gamma,
                        std::size_t horizon) {
    double total = 0.0, w = 1.0;
    for (std::size_t k = 0; k <= horizon; ++k) {
        total += w * x;
        const unsigned a = k < actions.size() ? actions[k] : 0;
        x = (x + 1 + a) % n_states;
        w *= gamma;
    }
    return total;
}

// min over all 2^depth binary sequences of sum_{k<depth} gamma^k g.
inline double cycle_enum_min(unsigned n_states, unsigned x0, double gamma, unsigned depth) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << depth); ++code) {
        double total = 0.0, w = 1.0;
        unsigned x = x0;
        for (unsigned k = 0; k < depth; ++k) {
            const unsigned a = (code >> (depth - 1 - k)) & 1u;
            total += w * x;
            x = (x + 1 + a) % n_states;
            w *= gamma;
        }
        best = std::min(best, total);
    }
    return best;
}

// Optimal discounted cost on the cycle MDP by value iteration to machine precision.
inline std::vector<double> cycle_optimal(unsigned n_states, double gamma) {
    std::vector<double> v(n_states, 0.0);
    for (int it = 0; it < 2000; ++it) {
        std::vector<double> next(n_states);
        for (unsigned x = 0; x < n_states; ++x)
            next[x] = x + gamma * std::min(v[(x + 1) % n_states], v[(x + 2) % n_states]);
        v = next;
    }
    return v;
}

}  // namespace oracle
