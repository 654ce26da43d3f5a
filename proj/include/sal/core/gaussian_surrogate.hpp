#pragma once

// Gaussian surrogate prior fitted from an ensemble of states. Stands in for
// a trained generative model: its score is exact, and because a Gaussian is
// closed under the forward noising process, the noise-level-perturbed scores
// needed by schedule-driven samplers are available in closed form,
//   x_t ~ N(sqrt(ab) m, ab Sigma + (1 - ab) I)  for ab = alpha_bar_t.
// External score models plug in through TimeScoreField instead.

#include "sal/common.hpp"
#include "sal/core/score_field.hpp"
#include "sal/samplers/noise_schedule.hpp"

#include <memory>
#include <vector>

namespace sal {

class GaussianSurrogate {
public:
    // lambda_min_factor floors covariance eigenvalues at
    // lambda_min_factor * trace / d, keeping the precision bounded when the
    // ensemble is degenerate.
    GaussianSurrogate(Vec mean, Mat cov, double lambda_min_factor = 1e-6)
        : mean_(std::move(mean)) {
        require(cov.rows() == cov.cols() && cov.rows() == mean_.size(),
                "GaussianSurrogate: covariance shape mismatch");
        Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
        require(eig.info() == Eigen::Success, "GaussianSurrogate: eigendecomposition failed");
        basis_ = eig.eigenvectors();
        eigenvalues_ = eig.eigenvalues();
        double trace = cov.trace();
        if (trace <= 0.0) trace = 1.0;
        lambda_min_ = lambda_min_factor * trace / static_cast<double>(cov.rows());
        for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
            eigenvalues_[i] = std::max(eigenvalues_[i], lambda_min_);
        }
    }

    static GaussianSurrogate fit(const std::vector<Vec>& ensemble,
                                 double lambda_min_factor = 1e-6) {
        require(!ensemble.empty(), "GaussianSurrogate::fit: empty ensemble");
        const Eigen::Index d = ensemble[0].size();
        require(static_cast<Eigen::Index>(ensemble.size()) >= 2 * d,
                "GaussianSurrogate::fit: ensemble must have at least 2 d members");
        Vec mean = Vec::Zero(d);
        for (const Vec& x : ensemble) mean += x;
        mean /= static_cast<double>(ensemble.size());
        Mat cov = Mat::Zero(d, d);
        for (const Vec& x : ensemble) {
            const Vec r = x - mean;
            cov.noalias() += r * r.transpose();
        }
        cov /= static_cast<double>(ensemble.size() - 1);
        return GaussianSurrogate(std::move(mean), std::move(cov), lambda_min_factor);
    }

    Eigen::Index dim() const { return mean_.size(); }
    const Vec& mean() const { return mean_; }
    const Vec& eigenvalues() const { return eigenvalues_; }
    double lambda_min() const { return lambda_min_; }

    Mat covariance() const {
        return basis_ * eigenvalues_.asDiagonal() * basis_.transpose();
    }

    // grad f(x) = Sigma^{-1} (x - m).
    Vec grad(const Vec& x) const {
        check_dim(x, dim(), "GaussianSurrogate::grad");
        const Vec proj = basis_.transpose() * (x - mean_);
        return basis_ * proj.cwiseQuotient(eigenvalues_).matrix();
    }

    // Potential gradient of the level-alpha_bar perturbed marginal.
    Vec perturbed_grad(const Vec& x, double alpha_bar) const {
        check_dim(x, dim(), "GaussianSurrogate::perturbed_grad");
        require(alpha_bar > 0.0 && alpha_bar <= 1.0,
                "GaussianSurrogate: alpha_bar must lie in (0, 1]");
        const double root = std::sqrt(alpha_bar);
        const Vec proj = basis_.transpose() * (x - root * mean_);
        Vec scaled(proj.size());
        for (Eigen::Index i = 0; i < proj.size(); ++i) {
            scaled[i] = proj[i] / (alpha_bar * eigenvalues_[i] + (1.0 - alpha_bar));
        }
        return basis_ * scaled;
    }

    double potential(const Vec& x) const {
        check_dim(x, dim(), "GaussianSurrogate::potential");
        const Vec proj = basis_.transpose() * (x - mean_);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < proj.size(); ++i) acc += proj[i] * proj[i] / eigenvalues_[i];
        return 0.5 * acc;
    }

    ScoreField score_field() const {
        ScoreField f;
        f.dim = static_cast<int>(dim());
        auto self = std::make_shared<GaussianSurrogate>(*this);
        f.potential = [self](const Vec& x) { return self->potential(x); };
        f.grad = [self](const Vec& x) { return self->grad(x); };
        return f;
    }

    // Schedule-driven field running the ladder from its noisiest level down:
    // step t of 0..T-1 uses level l = T-t with tau_t = beta_l/2. The
    // per-step potential gradient is the reverse variance-preserving drift
    // written in Langevin form,
    //   g(x, t) = -x - 2 s_l(x) = 2 grad f_l(x) - x,
    // which makes x - tau g + sqrt(2 tau) w the standard reverse-diffusion
    // Euler step (mean dilation 1 + beta/2, score weight beta, noise
    // sqrt(beta)). An optional guidance term g(x, alpha_bar) joins the score;
    // guidance built from a Gaussian should itself be level-perturbed so its
    // stiffness stays bounded at high noise.
    TimeScoreField annealed_field(
        const NoiseSchedule& schedule,
        std::function<Vec(const Vec&, double)> guidance_grad = nullptr) const {
        require(schedule.kind == NoiseSchedule::Kind::DdpmLinearBeta,
                "GaussianSurrogate::annealed_field: needs a DDPM schedule");
        TimeScoreField f;
        f.dim = static_cast<int>(dim());
        f.steps = schedule.steps;
        auto self = std::make_shared<GaussianSurrogate>(*this);
        const int T = schedule.steps;
        f.grad = [self, schedule, T, guidance_grad](const Vec& x, int t) {
            const int level = T - t;
            const double ab = schedule.alpha_bar_at(level);
            Vec g = self->perturbed_grad(x, ab);
            if (guidance_grad) g += guidance_grad(x, ab);
            return Vec(2.0 * g - x);
        };
        f.tau = [schedule, T](int t) { return 0.5 * schedule.beta_at(T - t); };
        return f;
    }

    std::function<Vec(const Vec&, double)> perturbed_grad_fn() const {
        auto self = std::make_shared<GaussianSurrogate>(*this);
        return [self](const Vec& x, double alpha_bar) {
            return self->perturbed_grad(x, alpha_bar);
        };
    }

private:
    Vec mean_;
    Mat basis_;        // eigenvectors
    Vec eigenvalues_;  // floored
    double lambda_min_ = 0.0;
};

}  // namespace sal
