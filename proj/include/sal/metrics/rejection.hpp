#pragma once

// Ground-truth conditional sampling by rejection: draw from the exact base
// sampler and keep points inside a thin band around the constraint. As the
// band shrinks this converges in law to the conditional distribution, which
// makes it the reference every sampler is judged against.

#include "sal/common.hpp"
#include "sal/core/rng.hpp"
#include "sal/metrics/stats.hpp"

#include <functional>
#include <vector>

namespace sal {

struct RejectionOracle {
    std::function<Vec(RngStream&)> base_sampler;  // exact i.i.d. sampler for p
    std::function<Vec(const Vec&)> h;             // constraint residual
    double band = 1e-2;                           // accept when ||h(x)|| <= band
    long max_attempts_per_sample = 100000;

    void validate() const {
        require(static_cast<bool>(base_sampler), "RejectionOracle: base sampler missing");
        require(static_cast<bool>(h), "RejectionOracle: constraint function missing");
        require(band > 0.0, "RejectionOracle: band must be positive");
        require(max_attempts_per_sample > 0, "RejectionOracle: max attempts must be positive");
    }
};

struct RejectionResult {
    std::vector<Vec> samples;
    double acceptance_rate = 0.0;
    long attempts = 0;
};

inline RejectionResult rejection_sample(const RejectionOracle& oracle, long n, RngStream& rng) {
    oracle.validate();
    require(n > 0, "rejection_sample: n must be positive");
    RejectionResult out;
    out.samples.reserve(n);
    const long max_attempts = oracle.max_attempts_per_sample * n;
    while (static_cast<long>(out.samples.size()) < n) {
        if (out.attempts >= max_attempts) {
            throw std::runtime_error(
                "rejection_sample: acceptance rate below 1e-6; widen the band or use an "
                "importance scheme");
        }
        Vec x = oracle.base_sampler(rng);
        ++out.attempts;
        if (oracle.h(x).norm() <= oracle.band) out.samples.push_back(std::move(x));
        // early abort once the acceptance estimate is hopeless
        if (out.attempts % 2000000 == 0 &&
            static_cast<double>(out.samples.size() + 1) / out.attempts < 1e-6) {
            throw std::runtime_error(
                "rejection_sample: acceptance rate below 1e-6; widen the band or use an "
                "importance scheme");
        }
    }
    out.acceptance_rate = static_cast<double>(out.samples.size()) / out.attempts;
    return out;
}

// Consistency probe: rerun at band/2 and compare a scalar statistic of the
// two sample sets against their combined standard error.
struct BandConsistency {
    double value_full = 0.0;
    double value_half = 0.0;
    double combined_se = 0.0;
    bool consistent = false;
};

inline BandConsistency band_consistency_check(
    const RejectionOracle& oracle, long n, RngStream& rng,
    const std::function<double(const std::vector<Vec>&)>& statistic,
    const std::function<double(const std::vector<Vec>&, RngStream&)>& statistic_se) {
    RejectionOracle half = oracle;
    half.band = 0.5 * oracle.band;
    RejectionResult full_run = rejection_sample(oracle, n, rng);
    RejectionResult half_run = rejection_sample(half, n, rng);
    BandConsistency out;
    out.value_full = statistic(full_run.samples);
    out.value_half = statistic(half_run.samples);
    const double se_full = statistic_se(full_run.samples, rng);
    const double se_half = statistic_se(half_run.samples, rng);
    out.combined_se = std::sqrt(se_full * se_full + se_half * se_half);
    out.consistent = std::abs(out.value_full - out.value_half) <= out.combined_se;
    return out;
}

}  // namespace sal
