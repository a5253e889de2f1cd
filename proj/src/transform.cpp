#include "scorelife/transform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "scorelife/parallel.hpp"
#include "scorelife/poly_approx.hpp"

namespace scorelife {

TransformParams params_from_trajectory(const Trajectory& traj, double gamma, unsigned base) {
    TransformParams p;
    p.base = base;
    p.phi_digits = prefix_phase(traj.actions, base);
    p.phi = p.phi_digits->value();
    double discount = 1.0;
    for (double c : traj.costs) {
        p.psi += discount * c;
        discount *= gamma;
    }
    p.steps = static_cast<double>(traj.length());
    return p;
}

TransformParams compose_params(const TransformParams& a, const TransformParams& b, double gamma) {
    if (a.base != b.base) throw TransformError("compose_params: base mismatch");
    TransformParams p;
    p.base = a.base;
    p.steps = a.steps + b.steps;
    p.psi = a.psi + std::pow(gamma, a.steps) * b.psi;
    if (a.phi_digits && b.phi_digits) {
        p.phi_digits = concat(*a.phi_digits, *b.phi_digits);
        p.phi = p.phi_digits->value();
    } else {
        p.phi = a.phi + std::pow(static_cast<double>(a.base), -a.steps) * b.phi;
    }
    return p;
}

double apply_transform(const ScoreLifeRep& base, const TransformParams& p, double gamma, const LifeValue& l) {
    if (p.phi_digits && static_cast<double>(p.phi_digits->size()) == p.steps) {
        if (l.base() != p.base) throw TransformError("life value base does not match transform");
        return (base.at(concat(*p.phi_digits, l)) - p.psi) / std::pow(gamma, p.steps);
    }
    return apply_transform(base, p, gamma, l.value());
}

double apply_transform(const ScoreLifeRep& base, const TransformParams& p, double gamma, double l) {
    const double arg = l * std::pow(static_cast<double>(p.base), -p.steps) + p.phi;
    if (!(arg >= 0.0 && arg < 1.0))
        throw TransformError("transformed life value " + std::to_string(arg) + " outside [0,1)");
    return (base.at_real(arg) - p.psi) / std::pow(gamma, p.steps);
}

namespace {

constexpr double kMinSteps = 1e-9;

struct Samples {
    std::vector<LifeValue> life;
    std::vector<double> l;
    std::vector<double> y;
};

struct Candidate {
    TransformParams params;
    double residual = std::numeric_limits<double>::infinity();
};

// Base values at the transformed arguments; false if an argument leaves [0,1).
bool base_values(const ScoreLifeRep& base, const Samples& s, const TransformParams& p, std::vector<double>& out) {
    out.resize(s.l.size());
    const bool exact = p.phi_digits && static_cast<double>(p.phi_digits->size()) == p.steps;
    const double scale = std::pow(static_cast<double>(p.base), -p.steps);
    for (std::size_t i = 0; i < s.l.size(); ++i) {
        if (exact) {
            out[i] = base.at(concat(*p.phi_digits, s.life[i]));
        } else {
            const double arg = s.l[i] * scale + p.phi;
            if (!(arg >= 0.0 && arg < 1.0)) return false;
            out[i] = base.at_real(arg);
        }
    }
    return true;
}

double sum_squares(const std::vector<double>& b, const Samples& s, double psi, double gamma_n) {
    double r = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double e = (b[i] - psi) / gamma_n - s.y[i];
        r += e * e;
    }
    return r;
}

// psi minimising the residual for fixed (phi, N), clamped to the search box.
Candidate with_best_psi(const ScoreLifeRep& base, const Samples& s, TransformParams p, double gamma,
                        double psi_bound) {
    std::vector<double> b;
    if (!base_values(base, s, p, b)) return {p, std::numeric_limits<double>::infinity()};
    const double gamma_n = std::pow(gamma, p.steps);
    double psi = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) psi += b[i] - gamma_n * s.y[i];
    p.psi = std::clamp(psi / static_cast<double>(b.size()), -psi_bound, psi_bound);
    return {p, sum_squares(b, s, p.psi, gamma_n)};
}

LifeValue digits_of(std::uint64_t k, unsigned n, unsigned base) {
    std::vector<std::uint8_t> d(n, 0);
    for (unsigned i = n; i-- > 0;) {
        d[i] = static_cast<std::uint8_t>(k % base);
        k /= base;
    }
    return {base, std::move(d)};
}

using ResidualFn = std::function<bool(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// Bounded Levenberg-Marquardt with a central-difference Jacobian.
Eigen::VectorXd levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd theta, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, const Eigen::VectorXd& step) {
    Eigen::VectorXd r;
    if (!fn(theta, r)) return theta;
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    const auto n = theta.size();
    for (int it = 0; it < 200 && cost > 0.0; ++it) {
        Eigen::MatrixXd J(r.size(), n);
        bool ok = true;
        for (Eigen::Index c = 0; c < n && ok; ++c) {
            Eigen::VectorXd hi = theta, lo = theta;
            hi[c] = std::min(upper[c], theta[c] + step[c]);
            lo[c] = std::max(lower[c], theta[c] - step[c]);
            Eigen::VectorXd rh, rl;
            if (!fn(hi, rh)) hi = theta, rh = r;
            if (!fn(lo, rl)) lo = theta, rl = r;
            const double h = hi[c] - lo[c];
            if (h <= 0.0) {
                J.col(c).setZero();
                continue;
            }
            J.col(c) = (rh - rl) / h;
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd grad = J.transpose() * r;
        if (grad.lpNorm<Eigen::Infinity>() == 0.0) break;
        bool accepted = false;
        while (lambda < 1e12) {
            Eigen::MatrixXd A = JtJ;
            for (Eigen::Index c = 0; c < n; ++c) A(c, c) += lambda * (JtJ(c, c) + 1e-12);
            const Eigen::VectorXd delta = A.ldlt().solve(-grad);
            Eigen::VectorXd next = (theta + delta).cwiseMax(lower).cwiseMin(upper);
            Eigen::VectorXd rn;
            if (fn(next, rn) && rn.squaredNorm() < cost) {
                const double improvement = cost - rn.squaredNorm();
                theta = std::move(next);
                r = std::move(rn);
                cost = r.squaredNorm();
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (improvement <= 1e-15 * cost) it = 1000;
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted) break;
    }
    return theta;
}

}  // namespace

TransformFit fit_params(const ScoreLifeRep& base, const ScoreLifeRep& target, double gamma,
                        const TransformFitConfig& cfg) {
    if (cfg.n_samples < 3) throw FitError("transform regression needs at least 3 samples");
    if (cfg.scan_steps < 1) throw FitError("transform regression needs scan_steps >= 1");
    const unsigned M = base.base();
    if (target.base() != M) throw FitError("base and target use different action sets");

    Samples s;
    s.life = sample_life_values(M, cfg.n_samples, cfg.seed, 96);
    for (const auto& lv : s.life) {
        s.l.push_back(lv.value());
        s.y.push_back(target.at(lv));
    }
    const double y_scale = std::max(1.0, std::abs(*std::max_element(s.y.begin(), s.y.end(),
                                                                     [](double a, double b) { return std::abs(a) < std::abs(b); })));

    // Coarse scan: integer N, phi over exact N-digit prefixes (when few) and a uniform grid.
    std::vector<TransformParams> grid;
    grid.push_back({M, 0.0, 0.0, kMinSteps, std::nullopt});
    for (unsigned n = 1; n <= cfg.scan_steps && n <= cfg.max_steps; ++n) {
        const double span = 1.0 - std::pow(static_cast<double>(M), -static_cast<double>(n));
        const double prefixes = std::pow(static_cast<double>(M), n);
        if (prefixes <= 4096.0)
            for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(prefixes); ++k) {
                TransformParams p{M, 0.0, 0.0, static_cast<double>(n), digits_of(k, n, M)};
                p.phi = p.phi_digits->value();
                grid.push_back(std::move(p));
            }
        for (std::size_t g = 0; g < cfg.phi_grid; ++g)
            grid.push_back({M, span * static_cast<double>(g) / static_cast<double>(cfg.phi_grid), 0.0,
                            static_cast<double>(n), std::nullopt});
    }
    std::vector<Candidate> scanned(grid.size());
    parallel_for(grid.size(), [&](std::size_t c) { scanned[c] = with_best_psi(base, s, grid[c], gamma, cfg.psi_bound); });

    std::vector<std::size_t> order(scanned.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scanned[a].residual < scanned[b].residual; });

    auto better = [](double candidate, double incumbent) { return candidate < incumbent * (1.0 - 1e-6) - 1e-24; };

    auto residual_of = [&](const TransformParams& p) {
        std::vector<double> b;
        if (!base_values(base, s, p, b)) return std::numeric_limits<double>::infinity();
        return sum_squares(b, s, p.psi, std::pow(gamma, p.steps));
    };

    // Continuous polish of the best scan candidates over (phi, psi, N).
    Candidate best = scanned[order.front()];
    if (!std::isfinite(best.residual)) throw FitError("transform regression: no feasible scan candidate");
    const std::size_t starts = std::min(cfg.polish_starts, order.size());
    std::vector<Candidate> polished(starts);
    parallel_for(starts, [&](std::size_t k) {
        const auto& start = scanned[order[k]].params;
        ResidualFn fn = [&](const Eigen::VectorXd& t, Eigen::VectorXd& r) {
            TransformParams p{M, t[0], t[1], t[2], std::nullopt};
            std::vector<double> b;
            if (!base_values(base, s, p, b)) return false;
            r.resize(static_cast<Eigen::Index>(b.size()));
            const double gn = std::pow(gamma, p.steps);
            for (std::size_t i = 0; i < b.size(); ++i) r[static_cast<Eigen::Index>(i)] = (b[i] - p.psi) / gn - s.y[i];
            return true;
        };
        Eigen::Vector3d t0(start.phi, start.psi, start.steps);
        Eigen::Vector3d lo(0.0, -cfg.psi_bound, kMinSteps), hi(kLastBelowOne, cfg.psi_bound, cfg.max_steps);
        Eigen::Vector3d h(1e-7, 1e-7 * std::max(1.0, std::abs(start.psi)), 1e-6);
        const Eigen::VectorXd t = levenberg_marquardt(fn, t0, lo, hi, h);
        TransformParams p{M, t[0], t[1], t[2], std::nullopt};
        polished[k] = {p, residual_of(p)};
    });
    for (const auto& c : polished)
        if (better(c.residual, best.residual)) best = c;

    TransformFit fit;
    if (!std::isfinite(best.residual)) throw FitError("transform regression diverged");
    fit.continuous = best.params;
    fit.residual_continuous = best.residual;

    // Integer snap: refit (phi, psi) with N fixed, also trying the exact digit prefix nearest phi.
    const double n_snap = std::max(1.0, std::round(best.params.steps));
    Candidate snap;
    if (best.params.steps == n_snap) {
        snap = best;
    } else {
        ResidualFn fn = [&](const Eigen::VectorXd& t, Eigen::VectorXd& r) {
            TransformParams p{M, t[0], t[1], n_snap, std::nullopt};
            std::vector<double> b;
            if (!base_values(base, s, p, b)) return false;
            r.resize(static_cast<Eigen::Index>(b.size()));
            const double gn = std::pow(gamma, n_snap);
            for (std::size_t i = 0; i < b.size(); ++i) r[static_cast<Eigen::Index>(i)] = (b[i] - p.psi) / gn - s.y[i];
            return true;
        };
        const double phi_max = 1.0 - std::pow(static_cast<double>(M), -n_snap);
        const double phi0 = std::min(best.params.phi, phi_max);
        const Candidate start = with_best_psi(base, s, {M, phi0, 0.0, n_snap, std::nullopt}, gamma, cfg.psi_bound);
        Eigen::Vector2d t0(start.params.phi, start.params.psi);
        Eigen::Vector2d lo(0.0, -cfg.psi_bound), hi(kLastBelowOne, cfg.psi_bound);
        Eigen::Vector2d h(1e-7, 1e-7 * std::max(1.0, std::abs(start.params.psi)));
        const Eigen::VectorXd t = levenberg_marquardt(fn, t0, lo, hi, h);
        TransformParams p{M, t[0], t[1], n_snap, std::nullopt};
        snap = {p, residual_of(p)};
        if (better(start.residual, snap.residual)) snap = start;
    }
    // Exact digit form of the snapped phase when it sits on the N-digit grid.
    if (!snap.params.phi_digits && n_snap <= 52.0 / bits_per_digit(M)) {
        const double units = std::pow(static_cast<double>(M), n_snap);
        const double k = std::round(snap.params.phi * units);
        if (k >= 0.0 && k < units) {
            TransformParams p{M, 0.0, 0.0, n_snap, digits_of(static_cast<std::uint64_t>(k), static_cast<unsigned>(n_snap), M)};
            p.phi = p.phi_digits->value();
            const Candidate exact = with_best_psi(base, s, p, gamma, cfg.psi_bound);
            if (!better(snap.residual, exact.residual)) snap = exact;
        }
    }
    fit.snapped = snap.params;
    fit.residual_snapped = snap.residual;

    fit.used_snap = fit.residual_snapped <= 1.1 * fit.residual_continuous + 1e-20;
    fit.chosen = fit.used_snap ? fit.snapped : fit.continuous;
    fit.residual = fit.used_snap ? fit.residual_snapped : fit.residual_continuous;
    const double rms = std::sqrt(fit.residual / static_cast<double>(cfg.n_samples));
    fit.reliable = std::isfinite(rms) && rms <= cfg.reliable_rms * y_scale;
    return fit;
}

void to_json(nlohmann::json& j, const TransformParams& p) {
    j = nlohmann::json{{"phi", p.phi}, {"psi", p.psi}, {"N", p.steps}, {"M", p.base}};
    if (p.phi_digits) j["phi_digits"] = *p.phi_digits;
}

void to_json(nlohmann::json& j, const TransformFit& fit) {
    j = nlohmann::json{{"phi", fit.chosen.phi},
                       {"psi", fit.chosen.psi},
                       {"N", fit.chosen.steps},
                       {"residual", fit.residual},
                       {"reliable", fit.reliable},
                       {"used_snap", fit.used_snap},
                       {"continuous", {{"phi", fit.continuous.phi}, {"psi", fit.continuous.psi}, {"N", fit.continuous.steps}, {"residual", fit.residual_continuous}}},
                       {"snapped", {{"phi", fit.snapped.phi}, {"psi", fit.snapped.psi}, {"N", fit.snapped.steps}, {"residual", fit.residual_snapped}}}};
}

}  // namespace scorelife
