#pragma once

// Counter-based random number stream with explicit (seed, stream) addressing.
//
// Each draw applies the SplitMix64 output function to an affine counter
// sequence whose base state is derived by hashing (seed, stream). Streams
// with distinct ids are statistically independent, and a given (seed,
// stream) pair reproduces its sequence bit-exactly regardless of what other
// streams were consumed. This is what lets a 1000-chain experiment fan out
// across threads and still be deterministic: chain k always owns stream k.

#include "sal/common.hpp"

#include <cstdint>

namespace sal {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), counter_(0) {
        base_ = detail::mix64(seed + detail::kGolden);
        base_ = detail::mix64(base_ ^ (stream * 0xda942042e4dd58b5ULL + detail::kGolden));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() {
        counter_ += detail::kGolden;
        return detail::mix64(base_ + counter_);
    }

    // Uniform in (0, 1): top 53 bits, offset by half an ulp so 0 is excluded
    // (log() of a draw is always finite).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + uniform() * (b - a); }

    // Standard normal via Box-Muller. Two uniforms per draw; no caching, so
    // the stream position is a pure function of the number of draws.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Vec normal_vec(Eigen::Index d) {
        Vec w(d);
        for (Eigen::Index i = 0; i < d; ++i) w[i] = normal();
        return w;
    }

    // Index in [0, n) from a single draw.
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t base_;
    std::uint64_t counter_;
};

}  // namespace sal
