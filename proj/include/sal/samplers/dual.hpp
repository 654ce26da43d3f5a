#pragma once

// Dual ascent on the Lagrange multiplier of an average equality constraint,
// and the stochastic primal-dual Langevin sampler that interleaves the
// multiplier update with Langevin steps on the tilted potential
// U(x, lambda) = f(x) + lambda^T h(x).

#include "sal/common.hpp"
#include "sal/constraints/equality.hpp"
#include "sal/core/rng.hpp"
#include "sal/core/score_field.hpp"
#include "sal/samplers/config.hpp"

#include <functional>
#include <vector>

namespace sal {

inline constexpr double kDualDivergenceGuard = 1e8;

// Tilted score field for a fixed multiplier: grad U = grad f + J_h^T lambda.
inline ScoreField tilted_score(const ScoreField& score, const EqualityConstraint& h,
                               const Vec& lambda) {
    require(score.dim == h.dim, "tilted_score: dimension mismatch");
    require(lambda.size() == h.m, "tilted_score: multiplier size mismatch");
    ScoreField out;
    out.dim = score.dim;
    out.grad = [score, h, lambda](const Vec& x) {
        return Vec(score.grad(x) + h.jacobian_at(x).transpose() * lambda);
    };
    if (score.has_potential()) {
        out.potential = [score, h, lambda](const Vec& x) {
            return score.potential(x) + lambda.dot(h.h(x));
        };
    }
    return out;
}

struct DualAscentResult {
    std::vector<Vec> lambda_trajectory;  // lambda_0 .. lambda_T
    Vec lambda_final;
    ScoreField tilted;  // grad U(., lambda_T)
};

// lambda_{t+1} = lambda_t + eta E_{p_lambda}[h(x)], with the inner
// expectation supplied by the caller (exact for Gaussian families, or a
// Monte Carlo average over an inner chain).
inline DualAscentResult dual_ascent(const ScoreField& score, const EqualityConstraint& h,
                                    double eta, int iters,
                                    const std::function<Vec(const Vec&)>& expected_h) {
    require(eta > 0.0, "dual_ascent: eta must be positive");
    require(iters >= 1, "dual_ascent: iters must be >= 1");
    DualAscentResult out;
    Vec lambda = Vec::Zero(h.m);
    out.lambda_trajectory.push_back(lambda);
    for (int t = 0; t < iters; ++t) {
        Vec e = expected_h(lambda);
        require(e.size() == h.m, "dual_ascent: estimator returned wrong size");
        lambda += eta * e;
        if (!all_finite(lambda) || lambda.norm() > kDualDivergenceGuard) {
            throw std::runtime_error(
                "dual_ascent: multiplier diverged at iteration " + std::to_string(t) +
                "; try a smaller eta");
        }
        out.lambda_trajectory.push_back(lambda);
    }
    out.lambda_final = lambda;
    out.tilted = tilted_score(score, h, lambda);
    return out;
}

struct PrimalDualResult {
    std::vector<Vec> samples;            // x_1 .. x_T
    std::vector<Vec> lambda_trajectory;  // lambda_0 .. lambda_T
    Vec final_point;
    Vec lambda_final;
};

// Stochastic primal-dual chain: the multiplier is updated with h evaluated
// at the single new iterate rather than an expectation.
inline PrimalDualResult primal_dual_langevin(const ScoreField& score, const EqualityConstraint& h,
                                             const SamplerConfig& config, Vec x0,
                                             bool record = true) {
    config.validate();
    require(score.dim == h.dim, "primal_dual_langevin: dimension mismatch");
    check_dim(x0, score.dim, "primal_dual_langevin");
    RngStream rng(config.seed, config.stream);

    PrimalDualResult out;
    if (record) {
        out.samples.reserve(config.steps);
        out.lambda_trajectory.reserve(config.steps + 1);
    }
    Vec x = std::move(x0);
    Vec lambda = Vec::Zero(h.m);
    if (record) out.lambda_trajectory.push_back(lambda);
    for (int t = 0; t < config.steps; ++t) {
        const double tau = config.tau_at(t);
        const double eta = config.eta ? *config.eta : 0.9 * config.tau_at(t);
        const Vec grad_u = score.grad_at(x) + h.jacobian_at(x).transpose() * lambda;
        x = x - tau * grad_u + std::sqrt(2.0 * tau) * rng.normal_vec(x.size());
        if (!all_finite(x) || x.norm() > config.divergence_guard) {
            throw std::runtime_error("primal_dual_langevin diverged at step " + std::to_string(t));
        }
        lambda += eta * h.h_at(x);
        if (!all_finite(lambda) || lambda.norm() > kDualDivergenceGuard) {
            throw std::runtime_error(
                "primal_dual_langevin: multiplier diverged at step " + std::to_string(t) +
                "; try a smaller eta");
        }
        if (record) {
            out.samples.push_back(x);
            out.lambda_trajectory.push_back(lambda);
        }
    }
    out.final_point = std::move(x);
    out.lambda_final = std::move(lambda);
    return out;
}

// Schedule-driven primal-dual chain: the x-update runs on the time-indexed
// field plus the multiplier tilt, the multiplier on h at the new iterate.
inline PrimalDualResult primal_dual_time_dependent(const TimeScoreField& score,
                                                   const EqualityConstraint& h,
                                                   const SamplerConfig& config, Vec x0,
                                                   bool record = false) {
    config.validate();
    require(score.steps == config.steps, "primal_dual_time_dependent: schedule length mismatch");
    require(score.dim == h.dim, "primal_dual_time_dependent: dimension mismatch");
    check_dim(x0, score.dim, "primal_dual_time_dependent");
    RngStream rng(config.seed, config.stream);

    PrimalDualResult out;
    Vec x = std::move(x0);
    Vec lambda = Vec::Zero(h.m);
    if (record) out.lambda_trajectory.push_back(lambda);
    for (int t = 0; t < config.steps; ++t) {
        const double tau = score.tau_at(t);
        const double eta = config.eta ? *config.eta : 0.9 * tau;
        const Vec grad_u = score.grad_at(x, t) + h.jacobian_at(x).transpose() * lambda;
        x = x - tau * grad_u + std::sqrt(2.0 * tau) * rng.normal_vec(x.size());
        if (!all_finite(x) || x.norm() > config.divergence_guard) {
            throw std::runtime_error("primal_dual_time_dependent diverged at step " +
                                     std::to_string(t));
        }
        lambda += eta * h.h_at(x);
        if (!all_finite(lambda) || lambda.norm() > kDualDivergenceGuard) {
            throw std::runtime_error("primal_dual_time_dependent: multiplier diverged at step " +
                                     std::to_string(t) + "; try a smaller eta");
        }
        if (record) {
            out.samples.push_back(x);
            out.lambda_trajectory.push_back(lambda);
        }
    }
    out.final_point = std::move(x);
    out.lambda_final = std::move(lambda);
    return out;
}

}  // namespace sal
