#pragma once

// Noise ladders for schedule-driven sampling: the linear-beta ladder with
// its alpha-bar products, and an annealed sigma sequence with tau_t
// proportional to sigma_t^2.

#include "sal/common.hpp"
#include "sal/core/rng.hpp"

#include <cmath>
#include <vector>

namespace sal {

struct NoiseSchedule {
    enum class Kind { AnnealedSigma, DdpmLinearBeta };

    Kind kind = Kind::DdpmLinearBeta;
    int steps = 0;

    // DDPM ladder, index t-1 holds level t in 1..T.
    std::vector<double> beta;
    std::vector<double> alpha;
    std::vector<double> alpha_bar;

    // Annealed ladder, decreasing.
    std::vector<double> sigma;

    double beta_at(int t) const {  // t in 1..T
        require(kind == Kind::DdpmLinearBeta, "NoiseSchedule: not a DDPM schedule");
        require(t >= 1 && t <= steps, "NoiseSchedule: level out of range");
        return beta[t - 1];
    }
    double alpha_at(int t) const { return 1.0 - beta_at(t); }
    double alpha_bar_at(int t) const {
        require(kind == Kind::DdpmLinearBeta, "NoiseSchedule: not a DDPM schedule");
        require(t >= 1 && t <= steps, "NoiseSchedule: level out of range");
        return alpha_bar[t - 1];
    }
    double sigma_at(int t) const {
        require(kind == Kind::AnnealedSigma, "NoiseSchedule: not an annealed schedule");
        require(t >= 1 && t <= steps, "NoiseSchedule: level out of range");
        return sigma[t - 1];
    }
};

// Linear beta ramp; alpha_bar accumulated in log space.
inline NoiseSchedule ddpm_schedule(int steps, double beta_start = 1e-4, double beta_end = 0.02) {
    require(steps >= 1, "ddpm_schedule: steps must be >= 1");
    require(0.0 < beta_start && beta_start <= beta_end && beta_end < 1.0,
            "ddpm_schedule: need 0 < beta_start <= beta_end < 1");
    NoiseSchedule s;
    s.kind = NoiseSchedule::Kind::DdpmLinearBeta;
    s.steps = steps;
    s.beta.resize(steps);
    s.alpha.resize(steps);
    s.alpha_bar.resize(steps);
    double log_acc = 0.0;
    for (int t = 0; t < steps; ++t) {
        const double frac = steps > 1 ? static_cast<double>(t) / (steps - 1) : 0.0;
        s.beta[t] = beta_start + (beta_end - beta_start) * frac;
        s.alpha[t] = 1.0 - s.beta[t];
        log_acc += std::log1p(-s.beta[t]);
        s.alpha_bar[t] = std::exp(log_acc);
    }
    return s;
}

// Geometric sigma ladder from sigma_max down to sigma_min.
inline NoiseSchedule annealed_schedule(int steps, double sigma_max, double sigma_min) {
    require(steps >= 1, "annealed_schedule: steps must be >= 1");
    require(sigma_max > sigma_min && sigma_min > 0.0,
            "annealed_schedule: need sigma_max > sigma_min > 0");
    NoiseSchedule s;
    s.kind = NoiseSchedule::Kind::AnnealedSigma;
    s.steps = steps;
    s.sigma.resize(steps);
    const double ratio = std::pow(sigma_min / sigma_max, 1.0 / std::max(1, steps - 1));
    double v = sigma_max;
    for (int t = 0; t < steps; ++t) {
        s.sigma[t] = v;
        v *= ratio;
    }
    return s;
}

// Score from a noise prediction: s = -eps_hat / sqrt(1 - alpha_bar).
inline Vec noise_to_score(const Vec& eps_hat, double alpha_bar) {
    require(alpha_bar > 0.0 && alpha_bar < 1.0, "noise_to_score: alpha_bar must lie in (0, 1)");
    return -eps_hat / std::sqrt(1.0 - alpha_bar);
}

// One reverse step of the noise ladder, mapping level t to t-1:
//   x_{t-1} = (x_t - (1 - alpha_t)/sqrt(1 - alpha_bar_t) eps_hat) / sqrt(alpha_t)
//             + sqrt(beta_t) w,
// with the noise omitted at t = 1.
inline Vec ddpm_sample_step(const Vec& x_t, const Vec& eps_hat, const NoiseSchedule& schedule,
                            int t, RngStream& rng) {
    require(schedule.kind == NoiseSchedule::Kind::DdpmLinearBeta,
            "ddpm_sample_step: needs a DDPM schedule");
    require(t >= 1 && t <= schedule.steps, "ddpm_sample_step: level out of range");
    const double alpha = schedule.alpha_at(t);
    const double alpha_bar = schedule.alpha_bar_at(t);
    Vec mean = (x_t - ((1.0 - alpha) / std::sqrt(1.0 - alpha_bar)) * eps_hat) / std::sqrt(alpha);
    if (t == 1) return mean;
    return mean + std::sqrt(schedule.beta_at(t)) * rng.normal_vec(x_t.size());
}

// Euler-Maruyama predictor for the reverse variance-preserving dynamics,
// drift a(x,t) = -beta/2 x and diffusion b = sqrt(beta):
//   x+ = x - tau [a(x,t) - b^2 s(x,t)] + b sqrt(2 tau) w.
inline Vec pc_predictor_step(const Vec& x, const Vec& score_at_x, double beta_t, double tau_t,
                             RngStream& rng) {
    require(beta_t >= 0.0, "pc_predictor_step: beta must be nonnegative");
    require(tau_t > 0.0, "pc_predictor_step: tau must be positive");
    const Vec drift = -0.5 * beta_t * x;
    Vec out = x - tau_t * (drift - beta_t * score_at_x) +
              std::sqrt(beta_t) * std::sqrt(2.0 * tau_t) * rng.normal_vec(x.size());
    ensure_finite(out, "pc_predictor_step output");
    return out;
}

// Langevin corrector: x+ = x + tau s(x,t) + sqrt(2 tau) w.
inline Vec pc_corrector_step(const Vec& x, const Vec& score_at_x, double tau_t, RngStream& rng) {
    require(tau_t > 0.0, "pc_corrector_step: tau must be positive");
    Vec out = x + tau_t * score_at_x + std::sqrt(2.0 * tau_t) * rng.normal_vec(x.size());
    ensure_finite(out, "pc_corrector_step output");
    return out;
}

}  // namespace sal
