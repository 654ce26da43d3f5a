#pragma once

// Unadjusted and projected Langevin steps and chains.

#include "sal/common.hpp"
#include "sal/constraints/constraint_set.hpp"
#include "sal/core/rng.hpp"
#include "sal/core/score_field.hpp"
#include "sal/samplers/config.hpp"

#include <vector>

namespace sal {

// x - tau grad f(x) + sqrt(2 tau) w with the noise supplied by the caller.
// The deterministic kernel exists so tests can force w = 0.
inline Vec ula_step_with_noise(const Vec& x, const ScoreField& score, double tau, const Vec& w) {
    require(tau > 0.0, "ula_step: tau must be positive");
    return x - tau * score.grad_at(x) + std::sqrt(2.0 * tau) * w;
}

inline Vec ula_step(const Vec& x, const ScoreField& score, double tau, RngStream& rng) {
    Vec y = ula_step_with_noise(x, score, tau, rng.normal_vec(x.size()));
    ensure_finite(y, "ula_step output");
    return y;
}

// P_C(z - tau grad f(z) + sqrt(2 tau) w): one unconstrained update followed
// by a projection, so the iterate never leaves the set.
inline Vec projected_langevin_step_with_noise(const Vec& z, const ScoreField& score,
                                              const ConstraintSet& set, double tau,
                                              const Vec& w) {
    return set.project(ula_step_with_noise(z, score, tau, w));
}

inline Vec projected_langevin_step(const Vec& z, const ScoreField& score,
                                   const ConstraintSet& set, double tau, RngStream& rng) {
    Vec y = projected_langevin_step_with_noise(z, score, set, tau, rng.normal_vec(z.size()));
    ensure_finite(y, "projected_langevin_step output");
    return y;
}

struct ChainResult {
    Vec final_point;
    std::vector<Vec> trajectory;  // filled only when recording
};

inline ChainResult ula_chain(const ScoreField& score, const SamplerConfig& config, Vec x0,
                             bool record = false) {
    config.validate();
    check_dim(x0, score.dim, "ula_chain");
    RngStream rng(config.seed, config.stream);
    ChainResult out;
    if (record) out.trajectory.reserve(config.steps);
    Vec x = std::move(x0);
    for (int t = 0; t < config.steps; ++t) {
        x = ula_step_with_noise(x, score, config.tau_at(t), rng.normal_vec(x.size()));
        if (!all_finite(x) || x.norm() > config.divergence_guard) {
            throw std::runtime_error("ula_chain diverged at step " + std::to_string(t));
        }
        if (record) out.trajectory.push_back(x);
    }
    out.final_point = std::move(x);
    return out;
}

// Schedule-driven chains: the time-indexed field supplies both the per-step
// gradient and the per-step size.
inline ChainResult time_dependent_chain(const TimeScoreField& score, const SamplerConfig& config,
                                        Vec x0, bool record = false) {
    config.validate();
    require(score.steps == config.steps, "time_dependent_chain: schedule length mismatch");
    check_dim(x0, score.dim, "time_dependent_chain");
    RngStream rng(config.seed, config.stream);
    ChainResult out;
    if (record) out.trajectory.reserve(config.steps);
    Vec x = std::move(x0);
    for (int t = 0; t < config.steps; ++t) {
        const double tau = score.tau_at(t);
        x = x - tau * score.grad_at(x, t) + std::sqrt(2.0 * tau) * rng.normal_vec(x.size());
        if (!all_finite(x) || x.norm() > config.divergence_guard) {
            throw std::runtime_error("time_dependent_chain diverged at step " + std::to_string(t));
        }
        if (record) out.trajectory.push_back(x);
    }
    out.final_point = std::move(x);
    return out;
}

inline ChainResult projected_time_dependent_chain(const TimeScoreField& score,
                                                  const ConstraintSet& set,
                                                  const SamplerConfig& config, const Vec& x0,
                                                  bool record = false) {
    config.validate();
    require(score.steps == config.steps, "projected_time_dependent_chain: schedule length mismatch");
    check_dim(x0, score.dim, "projected_time_dependent_chain");
    RngStream rng(config.seed, config.stream);
    ChainResult out;
    if (record) out.trajectory.reserve(config.steps);
    Vec z = set.project(x0);
    for (int t = 0; t < config.steps; ++t) {
        const double tau = score.tau_at(t);
        z = set.project(z - tau * score.grad_at(z, t) +
                        std::sqrt(2.0 * tau) * rng.normal_vec(z.size()));
        if (!all_finite(z) || z.norm() > config.divergence_guard) {
            throw std::runtime_error("projected_time_dependent_chain diverged at step " +
                                     std::to_string(t));
        }
        if (record) out.trajectory.push_back(z);
    }
    out.final_point = std::move(z);
    return out;
}

inline ChainResult projected_langevin_chain(const ScoreField& score, const ConstraintSet& set,
                                            const SamplerConfig& config, const Vec& x0,
                                            bool record = false) {
    config.validate();
    check_dim(x0, score.dim, "projected_langevin_chain");
    RngStream rng(config.seed, config.stream);
    ChainResult out;
    if (record) out.trajectory.reserve(config.steps);
    Vec z = set.project(x0);
    for (int t = 0; t < config.steps; ++t) {
        z = projected_langevin_step_with_noise(z, score, set, config.tau_at(t),
                                               rng.normal_vec(z.size()));
        if (!all_finite(z) || z.norm() > config.divergence_guard) {
            throw std::runtime_error("projected_langevin_chain diverged at step " +
                                     std::to_string(t));
        }
        if (record) out.trajectory.push_back(z);
    }
    out.final_point = std::move(z);
    return out;
}

}  // namespace sal
