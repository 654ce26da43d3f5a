#pragma once

// Variational analysis machinery: the linear-Gaussian observation model and
// the closed-form optimum of
//   J(x) = 1/2 ||y - H x||^2_{P^-1} + 1/2 ||x - b||^2_{B^-1},
// together with the equivalent posterior Gaussian used as the conditioning
// term when sampling.

#include "sal/burgers/spectral.hpp"
#include "sal/common.hpp"
#include "sal/core/gaussian_surrogate.hpp"

namespace sal::burgers {

struct ObservationModel {
    Mat H;           // m x d, rows are field-evaluation functionals
    double sigma;    // observation noise standard deviation (P = sigma^2 I)
    std::vector<double> locations;

    int count() const { return static_cast<int>(H.rows()); }

    Mat noise_cov() const {
        return sigma * sigma * Mat::Identity(H.rows(), H.rows());
    }

    Vec observe(const Vec& state, RngStream& rng) const {
        return H * state + sigma * rng.normal_vec(H.rows());
    }
};

// Point evaluations of the real-space field at `count` evenly spaced
// locations starting at 0.
inline ObservationModel make_observation_model(int modes, int count, double sigma) {
    require(count >= 1, "make_observation_model: need at least one location");
    ObservationModel m;
    m.sigma = sigma;
    m.H = Mat(count, real_dim(modes));
    for (int i = 0; i < count; ++i) {
        const double loc = kDomainLength * i / count;
        m.locations.push_back(loc);
        m.H.row(i) = observation_row(modes, loc).transpose();
    }
    return m;
}

struct ThreeDVarResult {
    Vec analysis;        // argmin J
    Mat posterior_cov;   // (B^-1 + H^T P^-1 H)^-1
};

inline ThreeDVarResult threedvar_analysis(const Vec& background, const Mat& B, const Vec& y,
                                          const Mat& P, const Mat& H) {
    require(H.rows() == y.size() && H.cols() == background.size(),
            "threedvar_analysis: operator shape mismatch");
    require(B.rows() == B.cols() && B.rows() == background.size(),
            "threedvar_analysis: background covariance shape mismatch");
    require(P.rows() == P.cols() && P.rows() == y.size(),
            "threedvar_analysis: noise covariance shape mismatch");

    const Mat innovation = H * B * H.transpose() + P;
    Eigen::LLT<Mat> llt(innovation);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("threedvar_analysis: singular innovation matrix");
    }
    ThreeDVarResult out;
    const Mat gain = B * H.transpose() * llt.solve(Mat::Identity(y.size(), y.size()));
    out.analysis = background + gain * (y - H * background);
    out.posterior_cov = B - gain * H * B;
    // symmetrize against rounding
    out.posterior_cov = 0.5 * (out.posterior_cov + out.posterior_cov.transpose());
    return out;
}

// The analysis posterior N(analysis, posterior_cov) packaged as a Gaussian
// whose perturbed score serves as the per-step conditioning term. The tiny
// eigenvalue floor only guards rounding in the covariance subtraction.
inline GaussianSurrogate posterior_gaussian(const ThreeDVarResult& r) {
    return GaussianSurrogate(r.analysis, r.posterior_cov, 1e-12);
}

}  // namespace sal::burgers
