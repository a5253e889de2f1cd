#include "scorelife/poly_approx.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "scorelife/parallel.hpp"
#include "scorelife/rollout.hpp"

namespace scorelife {

PolyRep::PolyRep(std::vector<double> coeffs, unsigned base, State state)
    : coeffs_(std::move(coeffs)), base_(base), state_(std::move(state)) {
    if (coeffs_.size() < 2) throw FitError("polynomial representation needs degree >= 1");
}

double PolyRep::eval(double l) const {
    double v = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * l + *it;
    return v;
}

std::vector<LifeValue> sample_life_values(unsigned base, std::size_t count, std::uint64_t seed, std::size_t depth) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<unsigned> digit(0, base - 1);
    std::vector<LifeValue> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<std::uint8_t> digits(depth);
        for (auto& d : digits) d = static_cast<std::uint8_t>(digit(rng));
        out.emplace_back(base, std::move(digits));
    }
    return out;
}

PolyRep fit_poly(std::span<const double> l, std::span<const double> y, unsigned degree, unsigned base, State x) {
    if (degree < 1) throw FitError("polynomial degree must be at least 1");
    if (l.size() != y.size()) throw FitError("sample sizes disagree");
    if (l.size() < degree + 1)
        throw FitError("need at least " + std::to_string(degree + 1) + " samples for degree " + std::to_string(degree));
    const auto n = static_cast<Eigen::Index>(l.size());
    const auto cols = static_cast<Eigen::Index>(degree + 1);
    Eigen::MatrixXd V(n, cols);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        double p = 1.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            V(r, c) = p;
            p *= l[static_cast<std::size_t>(r)];
        }
        rhs[r] = y[static_cast<std::size_t>(r)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv[0] / sv[cols - 1];
    if (!(sv[cols - 1] > 1e-12 * sv[0])) {
        std::ostringstream msg;
        msg << "rank-deficient polynomial fit (condition number " << cond << ", " << l.size() << " samples)";
        throw FitError(msg.str());
    }
    const Eigen::VectorXd a = svd.solve(rhs);
    std::vector<double> coeffs(a.data(), a.data() + a.size());
    PolyRep rep(std::move(coeffs), base, std::move(x));
    rep.sample_count = l.size();
    rep.rms = std::sqrt((V * a - rhs).squaredNorm() / static_cast<double>(n));
    return rep;
}

PolyRep fit_poly(const ScoreLifeRep& evaluator, const State& x, const PolyFitConfig& cfg) {
    const auto samples = sample_life_values(evaluator.base(), cfg.n_samples, cfg.seed, cfg.sample_depth);
    std::vector<double> l(samples.size()), y(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        l[i] = samples[i].value();
        y[i] = evaluator.at(samples[i]);
    });
    return fit_poly(l, y, cfg.degree, evaluator.base(), x);
}

namespace {

std::vector<double> derivative_roots(const std::vector<double>& coeffs) {
    std::vector<double> d;
    for (std::size_t k = 1; k < coeffs.size(); ++k) d.push_back(static_cast<double>(k) * coeffs[k]);
    double scale = 0.0;
    for (double v : d) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return {};
    while (d.size() > 1 && std::abs(d.back()) <= 1e-14 * scale) d.pop_back();
    if (d.size() <= 1) return {};
    if (d.size() == 2) return {-d[0] / d[1]};

    const auto m = static_cast<Eigen::Index>(d.size() - 1);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index r = 1; r < m; ++r) companion(r, r - 1) = 1.0;
    for (Eigen::Index r = 0; r < m; ++r) companion(r, m - 1) = -d[static_cast<std::size_t>(r)] / d.back();
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    std::vector<double> roots;
    auto dp = [&](double t) {
        double v = 0.0, dv = 0.0;
        for (auto it = d.rbegin(); it != d.rend(); ++it) {
            dv = dv * t + v;
            v = v * t + *it;
        }
        return std::pair{v, dv};
    };
    for (const auto& z : es.eigenvalues()) {
        if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) continue;
        double t = z.real();
        for (int it = 0; it < 4; ++it) {
            const auto [v, dv] = dp(t);
            if (dv == 0.0) break;
            t -= v / dv;
        }
        roots.push_back(t);
    }
    return roots;
}

PolyMin dense_grid_min(const PolyRep& rep) {
    constexpr std::size_t kGrid = 100000;
    PolyMin best{0.0, rep.eval(0.0)};
    std::size_t k_best = 0;
    for (std::size_t k = 1; k < kGrid; ++k) {
        const double t = static_cast<double>(k) / kGrid;
        if (const double v = rep.eval(t); v < best.value) best = {t, v}, k_best = k;
    }
    // golden-section refinement inside the neighbouring grid cells
    double a = std::max(0.0, (static_cast<double>(k_best) - 1.0) / kGrid);
    double b = std::min(kLastBelowOne, (static_cast<double>(k_best) + 1.0) / kGrid);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
        const double c = b - phi * (b - a), d = a + phi * (b - a);
        if (rep.eval(c) < rep.eval(d)) b = d;
        else a = c;
    }
    const double t = 0.5 * (a + b);
    if (const double v = rep.eval(t); v < best.value) best = {t, v};
    return best;
}

}  // namespace

PolyMin poly_min(const PolyRep& rep) {
    PolyMin best{0.0, rep.eval(0.0)};
    auto consider = [&](double t) {
        const double v = rep.eval(t);
        if (v < best.value || (v == best.value && t < best.l)) best = {t, v};
    };
    consider(kLastBelowOne);
    if (rep.degree() <= 5) {
        for (double t : derivative_roots(rep.coeffs()))
            if (t > 0.0 && t < kLastBelowOne) consider(t);
    } else {
        const auto g = dense_grid_min(rep);
        consider(g.l);
    }
    return best;
}

ActionCode bellman_action(const EnvModel& env, const State& x, const std::vector<PolyRep>& successor_reps) {
    if (successor_reps.size() != env.num_actions()) throw FitError("need one successor representation per action");
    unsigned best = 0;
    double best_q = 0.0;
    for (unsigned a = 0; a < env.num_actions(); ++a) {
        const double q = env.stage_cost(x, a) + env.gamma() * poly_min(successor_reps[a]).value;
        if (a == 0 || q < best_q) best = a, best_q = q;
    }
    return {best, env.num_actions()};
}

BellmanChoice bellman_select(const EnvModel& env, const State& x, const PolyFitConfig& cfg, std::size_t horizon) {
    const unsigned m = env.num_actions();
    const auto samples =
        sample_life_values(m, cfg.n_samples, cfg.seed, std::max(cfg.sample_depth, horizon + 1));
    std::vector<double> l(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) l[i] = samples[i].value();

    BellmanChoice out;
    out.q.resize(m);
    for (unsigned a = 0; a < m; ++a) {
        const State nx = env.next(x, a);
        const TruncatedEvaluator evaluator(env, nx, horizon);
        std::vector<double> y(samples.size());
        parallel_for(samples.size(), [&](std::size_t i) { y[i] = evaluator.at(samples[i]); });
        out.reps.push_back(fit_poly(l, y, cfg.degree, m, nx));
        out.q[a] = env.stage_cost(x, a) + env.gamma() * poly_min(out.reps.back()).value;
    }
    unsigned best = 0;
    for (unsigned a = 1; a < m; ++a)
        if (out.q[a] < out.q[best]) best = a;
    out.action = {best, m};
    return out;
}

void to_json(nlohmann::json& j, const PolyRep& rep) {
    j = nlohmann::json{{"degree", rep.degree()}, {"coeffs", rep.coeffs()}, {"rms", rep.rms},
                       {"samples", rep.sample_count}, {"M", rep.base()},  {"state", rep.state()}};
}

PolyRep poly_from_json(const nlohmann::json& j) {
    PolyRep rep(j.at("coeffs").get<std::vector<double>>(), j.value("M", 2u), j.value("state", State{}));
    if (j.contains("degree") && j.at("degree").get<unsigned>() != rep.degree())
        throw FitError("polynomial JSON: degree does not match coefficient count");
    rep.rms = j.value("rms", 0.0);
    rep.sample_count = j.value("samples", std::size_t{0});
    return rep;
}

}  // namespace scorelife
