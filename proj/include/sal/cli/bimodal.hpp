#pragma once

// Bimodal field with a prescribed energy: the controlled instance where the
// conditional distribution is reachable by rejection sampling and every
// sampler can be scored against it. The field is parametrized by its
// retained Fourier coefficients; the first carries an asymmetric two-mode
// law (one positive and tight, one negative and wide) and the rest are
// independent zero-mean Gaussians with a power-law scale. The energy level
// sits where only the negative mode can reach it.

#include "sal/common.hpp"
#include "sal/constraints/equality.hpp"
#include "sal/constraints/sets.hpp"
#include "sal/core/gaussian_mixture.hpp"
#include "sal/metrics/rejection.hpp"
#include "sal/metrics/stats.hpp"
#include "sal/samplers/dual.hpp"
#include "sal/samplers/langevin.hpp"
#include "sal/samplers/sal.hpp"
#include "sal/util/parallel.hpp"

#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace sal::cli {

struct BimodalConfig {
    int modes = 20;                  // retained Fourier coefficients
    double positive_mean = 1.0;
    double positive_sigma = 0.1;
    double negative_mean = -1.0;
    double negative_sigma = 0.5;
    double tail_scale = 0.4;         // sigma_k = tail_scale / k for k >= 2
    double energy = 2.0;

    int chains = 1000;
    double tau = 2e-4;
    int steps = 20000;
    double rho = 20.0;
    double rho_final = 20.0;         // > rho switches on the geometric ramp
    double pd_eta = 5e-4;

    long oracle_samples = 1000;
    double band = 0.02;
    int histogram_bins = 30;
    int dump_chains = 0;             // SAL per-step trajectory dumps

    std::uint64_t seed = 7;
    unsigned threads = 0;

    void validate() const {
        require(modes >= 1, "BimodalConfig: need at least one mode");
        require(chains >= 1 && oracle_samples >= 1, "BimodalConfig: positive counts");
        require(tau > 0.0 && steps >= 1 && rho > 0.0, "BimodalConfig: bad sampler parameters");
        require(band > 0.0 && energy > 0.0, "BimodalConfig: bad band or energy");
        require(positive_sigma > 0.0 && negative_sigma > 0.0 && tail_scale > 0.0,
                "BimodalConfig: bad field parameters");
    }

    GaussianMixture mixture() const {
        Vec mean_pos = Vec::Zero(modes), mean_neg = Vec::Zero(modes);
        mean_pos[0] = positive_mean;
        mean_neg[0] = negative_mean;
        Vec diag_pos(modes), diag_neg(modes);
        diag_pos[0] = positive_sigma * positive_sigma;
        diag_neg[0] = negative_sigma * negative_sigma;
        for (int k = 2; k <= modes; ++k) {
            const double sigma = tail_scale / static_cast<double>(k);
            diag_pos[k - 1] = sigma * sigma;
            diag_neg[k - 1] = sigma * sigma;
        }
        return GaussianMixture({0.5, 0.5}, {mean_pos, mean_neg},
                               {Mat(diag_pos.asDiagonal()), Mat(diag_neg.asDiagonal())});
    }
};

enum class BimodalMethod { Unconstrained, Projected, PrimalDual, Sal };

inline std::string method_name(BimodalMethod m) {
    switch (m) {
        case BimodalMethod::Unconstrained: return "unconstrained";
        case BimodalMethod::Projected: return "projected";
        case BimodalMethod::PrimalDual: return "primal-dual";
        case BimodalMethod::Sal: return "sal";
    }
    return "?";
}

struct BimodalMethodResult {
    std::vector<Vec> samples;        // final iterates, one per chain
    ViolationStats violation;        // |h| = |energy - E|
    double mode_fraction = 0.0;      // first coefficient below zero
    double w1_to_oracle = 0.0;       // on the first coefficient
    double mean_residual = 0.0;      // signed h mean (primal-dual diagnostics)
    double residual_stddev = 0.0;
    double max_z_violation = 0.0;    // sal only: across all steps of all chains
};

struct BimodalReport {
    std::map<BimodalMethod, BimodalMethodResult> methods;
    std::vector<Vec> oracle_samples;
    double oracle_acceptance = 0.0;
    double oracle_mode_fraction = 0.0;
    std::vector<SalRecord> sal_dump;  // first dump_chains trajectories, concatenated
};

inline BimodalReport run_bimodal_experiment(const BimodalConfig& config) {
    config.validate();
    const GaussianMixture mix = config.mixture();
    const ScoreField field = mix.score_field();
    const SphereConstraint sphere(config.modes, config.energy);
    const EqualityConstraint energy_h = energy_equality(config.modes, config.energy);
    auto first_coord = [](const Vec& x) { return x[0]; };
    auto violation_of = [&](const Vec& x) { return std::abs(energy_h.h(x)[0]); };

    BimodalReport report;

    // ground truth by rejection from the exact sampler
    {
        RejectionOracle oracle;
        oracle.base_sampler = [&mix](RngStream& rng) { return mix.sample(rng); };
        oracle.h = [&energy_h](const Vec& x) { return energy_h.h(x); };
        oracle.band = config.band;
        RngStream rng(config.seed, 1u << 20);
        RejectionResult r = rejection_sample(oracle, config.oracle_samples, rng);
        report.oracle_acceptance = r.acceptance_rate;
        report.oracle_mode_fraction = mode_fraction(r.samples, first_coord, 0.0);
        report.oracle_samples = std::move(r.samples);
    }
    std::vector<double> oracle_first;
    for (const Vec& x : report.oracle_samples) oracle_first.push_back(x[0]);

    const std::vector<BimodalMethod> methods = {BimodalMethod::Unconstrained,
                                                BimodalMethod::Projected,
                                                BimodalMethod::PrimalDual, BimodalMethod::Sal};
    for (BimodalMethod method : methods) {
        BimodalMethodResult result;
        result.samples.assign(config.chains, Vec());
        std::vector<double> z_violations(config.chains, 0.0);
        std::vector<SalRecord> dump;
        std::mutex dump_lock;

        parallel_for(config.chains, config.threads, [&](std::size_t chain) {
            SamplerConfig sampler;
            sampler.tau = config.tau;
            sampler.steps = config.steps;
            sampler.rho = config.rho;
            if (config.rho_final > config.rho) {
                sampler.rho_schedule =
                    geometric_rho_ramp(config.rho, config.rho_final, config.steps);
            }
            sampler.seed = config.seed + 100 + static_cast<int>(method);
            sampler.stream = chain;
            // chains start from exact draws of the unconstrained law
            RngStream init_rng(config.seed + 900, chain);
            const Vec x0 = mix.sample(init_rng);

            switch (method) {
                case BimodalMethod::Unconstrained:
                    result.samples[chain] = ula_chain(field, sampler, x0).final_point;
                    break;
                case BimodalMethod::Projected:
                    result.samples[chain] =
                        projected_langevin_chain(field, sphere, sampler, x0).final_point;
                    break;
                case BimodalMethod::PrimalDual: {
                    sampler.eta = config.pd_eta;
                    result.samples[chain] =
                        primal_dual_langevin(field, energy_h, sampler, x0, false).final_point;
                    break;
                }
                case BimodalMethod::Sal: {
                    const bool record = static_cast<int>(chain) < config.dump_chains;
                    SalResult r = sal_chain(field, sphere, sampler, x0, record);
                    result.samples[chain] = r.z_final;
                    z_violations[chain] = r.max_z_violation;
                    if (record) {
                        std::lock_guard<std::mutex> lock(dump_lock);
                        dump.insert(dump.end(), r.trajectory.begin(), r.trajectory.end());
                    }
                    break;
                }
            }
        });

        result.violation = constraint_violation_stats(result.samples, violation_of);
        result.mode_fraction = mode_fraction(result.samples, first_coord, 0.0);
        std::vector<double> firsts, residuals;
        for (const Vec& x : result.samples) {
            firsts.push_back(x[0]);
            residuals.push_back(energy_h.h(x)[0]);
        }
        result.w1_to_oracle = wasserstein1_1d(firsts, oracle_first);
        result.mean_residual = mean(residuals);
        result.residual_stddev = std::sqrt(variance(residuals));
        for (double v : z_violations) result.max_z_violation = std::max(result.max_z_violation, v);
        if (method == BimodalMethod::Sal) report.sal_dump = std::move(dump);
        report.methods[method] = std::move(result);
    }
    return report;
}

}  // namespace sal::cli
