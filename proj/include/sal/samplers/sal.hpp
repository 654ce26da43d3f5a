#pragma once

// Split augmented Langevin: the coupled (x, z, mu) chain whose z iterate
// always lies in the constraint set. The three updates per step are
//
//   x+  = x - tau (grad f(x) + rho (x - z + mu)) + sqrt(2 tau) w
//   z+  = P_C(x+ + mu + sqrt(2 tau) w')
//   mu+ = mu + eta (x+ - z+)
//
// with independent standard normal draws w, w'. The chain returns z_T,
// and a time-dependent variant swaps in per-step tau_t, rho_t and
// grad f(x, t) without changing the structure.

#include "sal/common.hpp"
#include "sal/constraints/constraint_set.hpp"
#include "sal/core/rng.hpp"
#include "sal/core/score_field.hpp"
#include "sal/samplers/config.hpp"

#include <optional>
#include <vector>

namespace sal {

struct ChainState {
    Vec x;
    Vec z;
    Vec mu;
    int t = 0;
};

// Initialization: z_0 = P_C(x_0), mu_0 = 0.
inline ChainState sal_init(Vec x0, const ConstraintSet& set) {
    check_dim(x0, set.dim(), "sal_init");
    ChainState s;
    s.z = set.project(x0);
    s.x = std::move(x0);
    s.mu = Vec::Zero(s.x.size());
    s.t = 0;
    return s;
}

inline ChainState sal_step_with_noise(const ChainState& state, const ScoreField& score,
                                      const ConstraintSet& set, double tau, double eta,
                                      double rho, const Vec& w, const Vec& w_prime,
                                      bool z_noise = true) {
    require(tau > 0.0 && eta > 0.0 && rho > 0.0, "sal_step: tau, eta, rho must be positive");
    const double noise_scale = std::sqrt(2.0 * tau);
    ChainState next;
    next.x = state.x - tau * (score.grad_at(state.x) + rho * (state.x - state.z + state.mu)) +
             noise_scale * w;
    Vec pre_projection = next.x + state.mu;
    if (z_noise) pre_projection += noise_scale * w_prime;
    next.z = set.project(pre_projection);
    next.mu = state.mu + eta * (next.x - next.z);
    next.t = state.t + 1;
    return next;
}

inline ChainState sal_step(const ChainState& state, const ScoreField& score,
                           const ConstraintSet& set, double tau, double eta, double rho,
                           RngStream& rng, bool z_noise = true) {
    const Vec w = rng.normal_vec(state.x.size());
    const Vec w_prime = rng.normal_vec(state.x.size());
    ChainState next = sal_step_with_noise(state, score, set, tau, eta, rho, w, w_prime, z_noise);
    ensure_finite(next.x, "sal_step x");
    ensure_finite(next.mu, "sal_step mu");
    return next;
}

struct SalRecord {
    int step;
    Vec x, z, mu;
    double coupling_norm;  // ||x - z||
    double violation;      // set violation of z
};

struct SalResult {
    Vec z_final;
    ChainState final_state;
    double max_z_violation = 0.0;  // across all steps
    std::vector<SalRecord> trajectory;  // filled only when recording
};

namespace detail {

template <typename TauFn, typename EtaFn, typename RhoFn, typename GradStepFn>
SalResult sal_loop(int steps, const ConstraintSet& set, RngStream& rng, ChainState state,
                   TauFn&& tau_at, EtaFn&& eta_at, RhoFn&& rho_at, GradStepFn&& grad_at,
                   bool z_noise, double divergence_guard, bool record) {
    SalResult out;
    if (record) out.trajectory.reserve(steps);
    for (int t = 0; t < steps; ++t) {
        const double tau = tau_at(t);
        const double eta = eta_at(t);
        const double rho = rho_at(t);
        const double noise_scale = std::sqrt(2.0 * tau);
        const Vec w = rng.normal_vec(state.x.size());
        const Vec w_prime = rng.normal_vec(state.x.size());

        ChainState next;
        next.x = state.x - tau * (grad_at(state.x, t) + rho * (state.x - state.z + state.mu)) +
                 noise_scale * w;
        Vec pre_projection = next.x + state.mu;
        if (z_noise) pre_projection += noise_scale * w_prime;
        next.z = set.project(pre_projection);
        next.mu = state.mu + eta * (next.x - next.z);
        next.t = t + 1;

        if (!all_finite(next.x) || !all_finite(next.mu) || next.x.norm() > divergence_guard) {
            throw std::runtime_error("sal chain diverged at step " + std::to_string(t));
        }
        const double viol = set.violation(next.z);
        out.max_z_violation = std::max(out.max_z_violation, viol);
        if (record) {
            out.trajectory.push_back(
                {t + 1, next.x, next.z, next.mu, (next.x - next.z).norm(), viol});
        }
        state = std::move(next);
    }
    out.z_final = state.z;
    out.final_state = std::move(state);
    return out;
}

}  // namespace detail

inline SalResult sal_chain(const ScoreField& score, const ConstraintSet& set,
                           const SamplerConfig& config, Vec x0, bool record = false) {
    config.validate();
    check_dim(x0, score.dim, "sal_chain");
    RngStream rng(config.seed, config.stream);
    ChainState state = sal_init(std::move(x0), set);
    return detail::sal_loop(
        config.steps, set, rng, std::move(state), [&](int t) { return config.tau_at(t); },
        [&](int t) { return config.eta_at(t); }, [&](int t) { return config.rho_at(t); },
        [&](const Vec& x, int) { return score.grad_at(x); }, config.z_noise,
        config.divergence_guard, record);
}

// Time-dependent variant: per-step gradient grad f(x, t) and step size
// tau_t from the time-indexed field; the multiplier is carried across
// steps (never reset between noise levels).
inline SalResult sal_time_dependent(const TimeScoreField& score, const ConstraintSet& set,
                                    const SamplerConfig& config, Vec x0, bool record = false) {
    config.validate();
    require(score.steps == config.steps,
            "sal_time_dependent: schedule length must match config.steps");
    check_dim(x0, score.dim, "sal_time_dependent");
    RngStream rng(config.seed, config.stream);
    ChainState state = sal_init(std::move(x0), set);
    return detail::sal_loop(
        config.steps, set, rng, std::move(state), [&](int t) { return score.tau_at(t); },
        [&](int t) { return config.eta ? *config.eta : 0.9 * config.rho_at(t) * score.tau_at(t); },
        [&](int t) { return config.rho_at(t); },
        [&](const Vec& x, int t) { return score.grad_at(x, t); }, config.z_noise,
        config.divergence_guard, record);
}

}  // namespace sal
