#pragma once

// Gaussian mixtures with exact sampling, log-density and analytic score.
// All log-density arithmetic stays in log space (log-sum-exp): the bimodal
// instances used throughout have modes whose densities differ by dozens of
// orders of magnitude at feasible points.

#include "sal/common.hpp"
#include "sal/core/rng.hpp"
#include "sal/core/score_field.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sal {

struct GaussianComponent {
    Vec mean;
    Mat cov;

    // cached at construction
    Eigen::LLT<Mat> llt;
    double log_norm = 0.0;  // -d/2 log(2 pi) - 1/2 log|cov|

    GaussianComponent(Vec m, Mat c) : mean(std::move(m)), cov(std::move(c)) {
        require(cov.rows() == cov.cols() && cov.rows() == mean.size(),
                "GaussianComponent: covariance shape mismatch");
        require(cov.isApprox(cov.transpose(), 1e-12), "GaussianComponent: covariance not symmetric");
        llt.compute(cov);
        require(llt.info() == Eigen::Success, "GaussianComponent: covariance not positive definite");
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < cov.rows(); ++i) {
            double l = llt.matrixL()(i, i);
            require(l > 0.0, "GaussianComponent: covariance not positive definite");
            log_det += 2.0 * std::log(l);
        }
        const double d = static_cast<double>(mean.size());
        log_norm = -0.5 * d * std::log(2.0 * M_PI) - 0.5 * log_det;
    }

    double log_pdf(const Vec& x) const {
        Vec r = x - mean;
        Vec s = llt.matrixL().solve(r);
        return log_norm - 0.5 * s.squaredNorm();
    }

    // Sigma^{-1} (x - mean)
    Vec precision_times(const Vec& x) const { return llt.solve(x - mean); }

    Vec sample(RngStream& rng) const {
        Vec z = rng.normal_vec(mean.size());
        return mean + llt.matrixL() * z;
    }
};

class GaussianMixture {
public:
    GaussianMixture(std::vector<double> weights, std::vector<Vec> means, std::vector<Mat> covs) {
        require(!weights.empty() && weights.size() == means.size() && weights.size() == covs.size(),
                "GaussianMixture: weights/means/covariances size mismatch");
        double sum = 0.0;
        for (double w : weights) {
            require(w >= 0.0, "GaussianMixture: negative weight");
            sum += w;
        }
        require(std::abs(sum - 1.0) <= 1e-12, "GaussianMixture: weights must sum to 1");
        dim_ = static_cast<int>(means[0].size());
        for (std::size_t k = 0; k < weights.size(); ++k) {
            require(means[k].size() == dim_, "GaussianMixture: mean dimension mismatch");
            components_.emplace_back(means[k], covs[k]);
            log_weights_.push_back(weights[k] > 0.0 ? std::log(weights[k])
                                                    : -std::numeric_limits<double>::infinity());
        }
        weights_ = std::move(weights);
    }

    static GaussianMixture single(Vec mean, Mat cov) {
        return GaussianMixture({1.0}, {std::move(mean)}, {std::move(cov)});
    }

    // Convenience for products of independent 1D mixtures along coordinate 0:
    // component k has mean m_k e_0 and covariance diag(s_k^2, sigmas^2...).
    int dim() const { return dim_; }
    std::size_t size() const { return components_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    const GaussianComponent& component(std::size_t k) const { return components_[k]; }

    double log_pdf(const Vec& x) const {
        check_dim(x, dim_, "GaussianMixture::log_pdf");
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> terms(components_.size());
        for (std::size_t k = 0; k < components_.size(); ++k) {
            terms[k] = log_weights_[k] + components_[k].log_pdf(x);
            best = std::max(best, terms[k]);
        }
        double acc = 0.0;
        for (double t : terms) acc += std::exp(t - best);
        return best + std::log(acc);
    }

    // Potential f(x) = -log p(x).
    double potential(const Vec& x) const { return -log_pdf(x); }

    // grad f(x) = sum_k r_k(x) Sigma_k^{-1} (x - m_k) with responsibilities
    // r_k = softmax(log w_k + log N_k(x)).
    Vec score(const Vec& x) const {
        check_dim(x, dim_, "GaussianMixture::score");
        std::vector<double> terms(components_.size());
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < components_.size(); ++k) {
            terms[k] = log_weights_[k] + components_[k].log_pdf(x);
            best = std::max(best, terms[k]);
        }
        double z = 0.0;
        for (double t : terms) z += std::exp(t - best);
        Vec g = Vec::Zero(dim_);
        for (std::size_t k = 0; k < components_.size(); ++k) {
            const double r = std::exp(terms[k] - best) / z;
            if (r > 0.0) g += r * components_[k].precision_times(x);
        }
        ensure_finite(g, "GaussianMixture::score");
        return g;
    }

    Vec mean() const {
        Vec m = Vec::Zero(dim_);
        for (std::size_t k = 0; k < components_.size(); ++k) m += weights_[k] * components_[k].mean;
        return m;
    }

    Vec sample(RngStream& rng) const {
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t pick = components_.size() - 1;
        for (std::size_t k = 0; k < components_.size(); ++k) {
            acc += weights_[k];
            if (u <= acc) {
                pick = k;
                break;
            }
        }
        return components_[pick].sample(rng);
    }

    ScoreField score_field() const {
        ScoreField f;
        f.dim = dim_;
        // the mixture is copied into the closures; fields outlive the mixture
        GaussianMixture self = *this;
        f.potential = [self](const Vec& x) { return self.potential(x); };
        GaussianMixture self2 = *this;
        f.grad = [self2](const Vec& x) { return self2.score(x); };
        return f;
    }

private:
    int dim_ = 0;
    std::vector<double> weights_;
    std::vector<double> log_weights_;
    std::vector<GaussianComponent> components_;
};

// Analytic score for a mixture at a point; free-function form used by callers
// that hold the mixture directly.
inline Vec gaussian_mixture_score(const GaussianMixture& mix, const Vec& x) {
    return mix.score(x);
}

}  // namespace sal
