#pragma once

// Cyclic data assimilation on the spectral Burgers model. A climatological
// Gaussian surrogate fitted on simulated trajectories provides the sampling
// prior; each cycle forecasts the previous analysis, assimilates the cycle-
// end observation through the variational posterior, draws posterior samples
// with the configured sampler, and averages them into the analysis. The
// prescribed mass and energy come from the ground-truth initial condition.

#include "sal/burgers/assimilation.hpp"
#include "sal/burgers/spectral.hpp"
#include "sal/common.hpp"
#include "sal/constraints/compose.hpp"
#include "sal/constraints/equality.hpp"
#include "sal/constraints/sets.hpp"
#include "sal/core/gaussian_surrogate.hpp"
#include "sal/samplers/dual.hpp"
#include "sal/samplers/langevin.hpp"
#include "sal/samplers/sal.hpp"
#include "sal/util/parallel.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace sal::burgers {

enum class DaMethod { ThreeDVar, Unconstrained, Projected, PrimalDual, Sal };

inline std::string method_name(DaMethod m) {
    switch (m) {
        case DaMethod::ThreeDVar: return "3dvar";
        case DaMethod::Unconstrained: return "unconstrained";
        case DaMethod::Projected: return "projected";
        case DaMethod::PrimalDual: return "primal-dual";
        case DaMethod::Sal: return "sal";
    }
    return "?";
}

enum class ConstraintMode { None, Mass, Energy, MassAndEnergy };

inline std::string constraint_mode_name(ConstraintMode m) {
    switch (m) {
        case ConstraintMode::None: return "none";
        case ConstraintMode::Mass: return "mass";
        case ConstraintMode::Energy: return "energy";
        case ConstraintMode::MassAndEnergy: return "mass-energy";
    }
    return "?";
}

struct DaConfig {
    BurgersParams model;           // K = 20, nu = 0.01, c = 1
    double dt = 1e-3;
    double horizon = 4.0;          // configurable; 8 is the other documented choice
    int cycles = 5;
    int observation_times = 10;    // equally spaced over the horizon
    int observation_locations = 4;
    double sigma_obs_factor = 0.05;  // times the climatological RMS amplitude
    int posterior_samples = 5;
    int trajectories = 50;

    int training_trajectories = 1000;
    int training_snapshots = 10;
    double init_decay = 1.5;
    double init_amplitude = 1.0;

    int ddpm_steps = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    double rho = 20.0;
    double rho_final = 200.0;      // geometric ramp target; equal to rho for constant
    double pd_eta = 2e-4;

    ConstraintMode constraint = ConstraintMode::MassAndEnergy;
    std::vector<DaMethod> methods = {DaMethod::ThreeDVar, DaMethod::Unconstrained,
                                     DaMethod::Projected, DaMethod::PrimalDual, DaMethod::Sal};

    std::uint64_t seed = 1;
    unsigned threads = 0;

    void validate() const {
        require(model.modes >= 2, "DaConfig: need at least two modes");
        require(cycles >= 1 && observation_times >= cycles,
                "DaConfig: observation times must cover the cycles");
        require(observation_times % cycles == 0,
                "DaConfig: observation times must be a multiple of cycles");
        require(posterior_samples >= 1 && trajectories >= 1, "DaConfig: positive counts");
        require(horizon > 0.0 && dt > 0.0, "DaConfig: positive horizon and dt");
        require(training_trajectories * training_snapshots >= 2 * real_dim(model.modes),
                "DaConfig: training ensemble too small for the surrogate fit");
    }
};

struct DaCycleMetrics {
    double l2_error = 0.0;            // relative state error at the cycle end
    double mass_violation_sq = 0.0;   // (mass - M)^2 of the analysis
    double energy_violation_sq = 0.0; // (energy - E)^2 of the analysis
};

struct DaReport {
    // [method][trajectory][cycle]
    std::map<DaMethod, std::vector<std::vector<DaCycleMetrics>>> per_trajectory;
    GaussianSurrogate prior{Vec::Zero(1), Mat::Identity(1, 1)};
    double sigma_obs = 0.0;

    std::vector<DaCycleMetrics> cycle_means(DaMethod m) const {
        const auto& rows = per_trajectory.at(m);
        const std::size_t cycles = rows.at(0).size();
        std::vector<DaCycleMetrics> out(cycles);
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < cycles; ++c) {
                out[c].l2_error += row[c].l2_error;
                out[c].mass_violation_sq += row[c].mass_violation_sq;
                out[c].energy_violation_sq += row[c].energy_violation_sq;
            }
        }
        for (auto& m_ : out) {
            m_.l2_error /= static_cast<double>(rows.size());
            m_.mass_violation_sq /= static_cast<double>(rows.size());
            m_.energy_violation_sq /= static_cast<double>(rows.size());
        }
        return out;
    }

    // per-trajectory mean l2 error, for paired method comparisons
    std::vector<double> trajectory_errors(DaMethod m) const {
        std::vector<double> out;
        for (const auto& row : per_trajectory.at(m)) {
            double acc = 0.0;
            for (const auto& c : row) acc += c.l2_error;
            out.push_back(acc / static_cast<double>(row.size()));
        }
        return out;
    }
};

// Climatological ensemble: `trajectories` random initial states evolved over
// the horizon, recorded at `snapshots` equally spaced times (the same grid
// the observations use).
inline std::vector<Vec> simulate_training_ensemble(const DaConfig& config, std::uint64_t seed) {
    std::vector<Vec> ensemble(
        static_cast<std::size_t>(config.training_trajectories) * config.training_snapshots);
    const double snap_dt = config.horizon / config.training_snapshots;
    parallel_for(config.training_trajectories, config.threads, [&](std::size_t i) {
        RngStream rng(seed, i);
        Modes u = sample_initial_condition(rng, config.model.modes, config.init_decay,
                                           config.init_amplitude);
        for (int s = 0; s < config.training_snapshots; ++s) {
            u = integrate_rk4(u, snap_dt, config.dt, config.model);
            ensemble[i * config.training_snapshots + s] = modes_to_real(u);
        }
    });
    return ensemble;
}

inline ConstraintPtr build_constraint_set(ConstraintMode mode, int dim, double mass_target,
                                          double energy_target) {
    const double plane_target = mass_target / std::sqrt(kDomainLength);
    Vec e0 = Vec::Zero(dim);
    e0[0] = 1.0;
    switch (mode) {
        case ConstraintMode::None:
            return std::make_shared<FreeSet>(dim);
        case ConstraintMode::Mass:
            return std::make_shared<HyperplaneConstraint>(e0, plane_target);
        case ConstraintMode::Energy:
            return std::make_shared<SphereConstraint>(dim, energy_target);
        case ConstraintMode::MassAndEnergy: {
            std::vector<ConstraintPtr> members = {
                std::make_shared<HyperplaneConstraint>(e0, plane_target),
                std::make_shared<SphereConstraint>(dim, energy_target)};
            return std::make_shared<IntersectionSet>(std::move(members), 200, 1e-11);
        }
    }
    throw std::invalid_argument("build_constraint_set: unknown mode");
}

// h(y) = (mass - M, energy - E) restricted to the active mode, for the
// primal-dual sampler.
inline EqualityConstraint build_equality(ConstraintMode mode, int dim, double mass_target,
                                         double energy_target) {
    const double root_l = std::sqrt(kDomainLength);
    EqualityConstraint h;
    h.dim = dim;
    switch (mode) {
        case ConstraintMode::None:
            h.m = 1;
            h.h = [](const Vec&) { return Vec(Vec::Zero(1)); };
            h.jacobian = [dim](const Vec&) { return Mat(Mat::Zero(1, dim)); };
            return h;
        case ConstraintMode::Mass:
            h.m = 1;
            h.h = [root_l, mass_target](const Vec& y) {
                return Vec(Vec::Constant(1, root_l * y[0] - mass_target));
            };
            h.jacobian = [dim, root_l](const Vec&) {
                Mat J = Mat::Zero(1, dim);
                J(0, 0) = root_l;
                return J;
            };
            return h;
        case ConstraintMode::Energy:
            h.m = 1;
            h.h = [energy_target](const Vec& y) {
                return Vec(Vec::Constant(1, 0.5 * y.squaredNorm() - energy_target));
            };
            h.jacobian = [](const Vec& y) { return Mat(y.transpose()); };
            return h;
        case ConstraintMode::MassAndEnergy:
            h.m = 2;
            h.h = [root_l, mass_target, energy_target](const Vec& y) {
                Vec v(2);
                v[0] = root_l * y[0] - mass_target;
                v[1] = 0.5 * y.squaredNorm() - energy_target;
                return v;
            };
            h.jacobian = [dim, root_l](const Vec& y) {
                Mat J(2, dim);
                J.setZero();
                J(0, 0) = root_l;
                J.row(1) = y.transpose();
                return J;
            };
            return h;
    }
    throw std::invalid_argument("build_equality: unknown mode");
}

struct CycleInputs {
    const GaussianSurrogate* prior = nullptr;
    const NoiseSchedule* schedule = nullptr;
    GaussianSurrogate posterior{Vec::Zero(1), Mat::Identity(1, 1)};  // conditioning term
    ConstraintPtr constraint;
    EqualityConstraint equality;
    ConstraintMode mode = ConstraintMode::None;
};

// One assimilation step: draw the configured number of posterior samples
// with the chosen method, average them, and re-project the average when a
// constraint is active (the mean of sphere points leaves the sphere).
inline Vec assimilation_cycle(const CycleInputs& in, DaMethod method, const DaConfig& config,
                              std::uint64_t seed, std::uint64_t stream_base) {
    const int d = static_cast<int>(in.prior->dim());
    TimeScoreField field =
        in.prior->annealed_field(*in.schedule, in.posterior.perturbed_grad_fn());

    Vec mean_sample = Vec::Zero(d);
    for (int s = 0; s < config.posterior_samples; ++s) {
        SamplerConfig sampler;
        sampler.steps = config.ddpm_steps;
        sampler.seed = seed;
        sampler.stream = stream_base + static_cast<std::uint64_t>(s);
        sampler.rho = config.rho;
        if (config.rho_final > config.rho) {
            sampler.rho_schedule = geometric_rho_ramp(config.rho, config.rho_final, sampler.steps);
        }
        RngStream init_rng(seed ^ 0x9e3779b9, sampler.stream);
        const Vec x0 = init_rng.normal_vec(d);

        Vec draw;
        switch (method) {
            case DaMethod::ThreeDVar:
                draw = in.posterior.mean();
                break;
            case DaMethod::Unconstrained:
                draw = time_dependent_chain(field, sampler, x0).final_point;
                break;
            case DaMethod::Projected:
                draw = projected_time_dependent_chain(field, *in.constraint, sampler, x0)
                           .final_point;
                break;
            case DaMethod::PrimalDual: {
                sampler.eta = config.pd_eta;
                draw = primal_dual_time_dependent(field, in.equality, sampler, x0).final_point;
                break;
            }
            case DaMethod::Sal:
                draw = sal_time_dependent(field, *in.constraint, sampler, x0).z_final;
                break;
        }
        mean_sample += draw;
    }
    mean_sample /= static_cast<double>(config.posterior_samples);

    const bool constrained =
        method == DaMethod::Projected || method == DaMethod::Sal;
    if (constrained && in.mode != ConstraintMode::None) {
        mean_sample = in.constraint->project(mean_sample);
    }
    return mean_sample;
}

inline DaReport run_da_experiment(const DaConfig& config) {
    config.validate();
    const int d = real_dim(config.model.modes);

    // climatological surrogate
    const std::vector<Vec> ensemble = simulate_training_ensemble(config, config.seed);
    GaussianSurrogate prior = GaussianSurrogate::fit(ensemble);

    // observation noise from the climatological RMS field amplitude
    double mean_sq = 0.0;
    for (const Vec& y : ensemble) mean_sq += y.squaredNorm();
    mean_sq /= static_cast<double>(ensemble.size());
    const double rms_amplitude = std::sqrt(mean_sq / kDomainLength);
    const double sigma_obs = config.sigma_obs_factor * rms_amplitude;

    const ObservationModel obs =
        make_observation_model(config.model.modes, config.observation_locations, sigma_obs);
    const NoiseSchedule schedule =
        ddpm_schedule(config.ddpm_steps, config.beta_start, config.beta_end);
    const Mat climate_cov = prior.covariance();

    DaReport report;
    report.prior = prior;
    report.sigma_obs = sigma_obs;
    for (DaMethod m : config.methods) {
        report.per_trajectory[m] = std::vector<std::vector<DaCycleMetrics>>(
            config.trajectories, std::vector<DaCycleMetrics>(config.cycles));
    }

    const double cycle_span = config.horizon / config.cycles;
    const int obs_per_cycle = config.observation_times / config.cycles;
    const double obs_span = config.horizon / config.observation_times;

    parallel_for(config.trajectories, config.threads, [&](std::size_t traj) {
        // ground truth and its conserved targets
        RngStream truth_rng(config.seed + 7777, traj);
        Modes truth = sample_initial_condition(truth_rng, config.model.modes, config.init_decay,
                                               config.init_amplitude);
        const double mass_target = mass(truth);
        const double energy_target = energy(truth);

        const ConstraintPtr constraint = build_constraint_set(
            config.constraint, d, mass_target, energy_target);
        const EqualityConstraint equality =
            build_equality(config.constraint, d, mass_target, energy_target);

        // observations along the truth, shared across methods
        std::vector<Vec> cycle_observations;
        {
            RngStream obs_rng(config.seed + 31415, traj);
            Modes u = truth;
            for (int j = 1; j <= config.observation_times; ++j) {
                u = integrate_rk4(u, obs_span, config.dt, config.model);
                if (j % obs_per_cycle == 0) {
                    cycle_observations.push_back(obs.observe(modes_to_real(u), obs_rng));
                }
            }
        }

        // truth states at cycle ends
        std::vector<Vec> truth_at_cycle;
        {
            Modes u = truth;
            for (int c = 0; c < config.cycles; ++c) {
                u = integrate_rk4(u, cycle_span, config.dt, config.model);
                truth_at_cycle.push_back(modes_to_real(u));
            }
        }

        for (DaMethod method : config.methods) {
            Vec analysis = prior.mean();  // cold start from climatology
            for (int c = 0; c < config.cycles; ++c) {
                // forecast to the cycle end
                Modes bg_modes = integrate_rk4(real_to_modes(analysis), cycle_span, config.dt,
                                               config.model);
                const Vec background = modes_to_real(bg_modes);

                ThreeDVarResult var = threedvar_analysis(background, climate_cov,
                                                         cycle_observations[c], obs.noise_cov(),
                                                         obs.H);
                CycleInputs inputs;
                inputs.prior = &prior;
                inputs.schedule = &schedule;
                inputs.posterior = posterior_gaussian(var);
                inputs.constraint = constraint;
                inputs.equality = equality;
                inputs.mode = config.constraint;

                const std::uint64_t stream_base =
                    (static_cast<std::uint64_t>(traj) * 64 + static_cast<std::uint64_t>(c)) * 8;
                analysis = assimilation_cycle(inputs, method, config,
                                              config.seed + 1000 + static_cast<int>(method),
                                              stream_base);

                DaCycleMetrics& metrics = report.per_trajectory[method][traj][c];
                const Vec& truth_now = truth_at_cycle[c];
                metrics.l2_error = (analysis - truth_now).norm() / truth_now.norm();
                const double dm = mass_real(analysis) - mass_target;
                const double de = energy_real(analysis) - energy_target;
                metrics.mass_violation_sq = dm * dm;
                metrics.energy_violation_sq = de * de;
            }
        }
    });
    return report;
}

}  // namespace sal::burgers
