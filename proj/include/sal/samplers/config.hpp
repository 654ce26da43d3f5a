#pragma once

// Sampler configuration shared by every chain-based algorithm. Step size,
// dual step and coupling can each be scheduled per step; the coupling
// schedule must be nondecreasing.

#include "sal/common.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace sal {

struct SamplerConfig {
    double tau = 1e-2;              // Langevin step size
    std::optional<double> eta;      // dual step; defaults to 0.9 * rho * tau
    double rho = 1.0;               // coupling strength
    int steps = 1000;               // iteration count T
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // Optional schedules indexed by step; when set they override the
    // scalar fields above.
    std::function<double(int)> tau_schedule;
    std::function<double(int)> rho_schedule;

    bool z_noise = true;            // diagnostic ablation switch for the z-update noise
    double divergence_guard = kDivergenceGuard;

    double tau_at(int t) const { return tau_schedule ? tau_schedule(t) : tau; }
    double rho_at(int t) const { return rho_schedule ? rho_schedule(t) : rho; }

    // The dual step stays commensurate with the coupling term's scale.
    double eta_at(int t) const { return eta ? *eta : 0.9 * rho_at(t) * tau_at(t); }

    void validate() const {
        require(steps >= 1, "SamplerConfig: steps must be >= 1");
        if (!eta.has_value() || *eta > 0.0) {
            // ok
        } else {
            throw std::invalid_argument("SamplerConfig: eta must be positive");
        }
        double prev_rho = -1.0;
        for (int t = 0; t < steps; ++t) {
            require(tau_at(t) > 0.0, "SamplerConfig: tau must be positive at every step");
            const double r = rho_at(t);
            require(r > 0.0, "SamplerConfig: rho must be positive at every step");
            require(r >= prev_rho, "SamplerConfig: rho schedule must be nondecreasing");
            prev_rho = r;
        }
    }
};

// Geometric coupling ramp from rho0 to rho1 over T steps.
inline std::function<double(int)> geometric_rho_ramp(double rho0, double rho1, int steps) {
    require(rho0 > 0.0 && rho1 >= rho0, "geometric_rho_ramp: need 0 < rho0 <= rho1");
    require(steps >= 1, "geometric_rho_ramp: steps must be >= 1");
    const double log_ratio = std::log(rho1 / rho0);
    return [rho0, log_ratio, steps](int t) {
        const double frac = steps > 1 ? static_cast<double>(t) / (steps - 1) : 1.0;
        return rho0 * std::exp(log_ratio * frac);
    };
}

}  // namespace sal
