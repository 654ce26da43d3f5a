#pragma once

// Feasibility success-rate harness: a Gaussian trajectory prior fitted on
// dynamics-feasible rollouts with random periodic excitations, samplers that
// draw warm starts from it (with or without constraint enforcement), and the
// ADMM solve whose success fraction is tabulated per obstacle size.

#include "sal/common.hpp"
#include "sal/constraints/compose.hpp"
#include "sal/control/admm.hpp"
#include "sal/control/trajectory.hpp"
#include "sal/core/gaussian_surrogate.hpp"
#include "sal/metrics/stats.hpp"
#include "sal/samplers/langevin.hpp"
#include "sal/samplers/sal.hpp"
#include "sal/util/parallel.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace sal::control {

enum class FeasibilityMethod { Unconstrained, Projected, Sal };

inline std::string method_name(FeasibilityMethod m) {
    switch (m) {
        case FeasibilityMethod::Unconstrained: return "unconstrained";
        case FeasibilityMethod::Projected: return "projected";
        case FeasibilityMethod::Sal: return "sal";
    }
    return "?";
}

// Random periodic excitation u(s) = sum_{k=1..3} A_k sin(w_k s + phi_k),
// clipped to the control box; the matching states come from the same
// stencil the constraint encodes, so every sample is dynamics-feasible.
inline Vec sample_excited_trajectory(const DynamicsParams& p, RngStream& rng) {
    Vec u(p.steps);
    double amp[3], freq[3], phase[3];
    for (int k = 0; k < 3; ++k) {
        amp[k] = rng.uniform(0.0, p.u_max / 3.0);
        freq[k] = rng.uniform(1.0, 12.0);
        phase[k] = rng.uniform(0.0, 2.0 * M_PI);
    }
    for (int i = 0; i < p.steps; ++i) {
        const double s = i * p.ds;
        double v = 0.0;
        for (int k = 0; k < 3; ++k) v += amp[k] * std::sin(freq[k] * s + phase[k]);
        u[i] = std::clamp(v, -p.u_max, p.u_max);
    }
    Vec x(p.dim());
    x.head(p.steps) = simulate_states(p, u);
    x.tail(p.steps) = u;
    return x;
}

inline GaussianSurrogate build_trajectory_prior(const DynamicsParams& p, int n_samples,
                                                std::uint64_t seed, unsigned threads = 0) {
    require(n_samples >= 2 * p.dim(), "build_trajectory_prior: need at least 2 d samples");
    std::vector<Vec> ensemble(n_samples);
    parallel_for(n_samples, threads, [&](std::size_t i) {
        RngStream rng(seed, i);
        ensemble[i] = sample_excited_trajectory(p, rng);
    });
    return GaussianSurrogate::fit(ensemble);
}

struct FeasibilityConfig {
    DynamicsParams dynamics;
    std::vector<double> obstacle_radii = {0.0, 0.25, 0.5, 0.75, 1.0};
    int obstacle_index = 100;       // mid-horizon, where the prior mean path sits
    double obstacle_center = 0.0;
    int samples = 1000;             // warm starts per method per radius
    int prior_trajectories = 1000;

    int ddpm_steps = 500;
    double beta_start = 1e-4 * 1000.0 / 500.0;
    double beta_end = 0.02 * 1000.0 / 500.0;
    double rho = 2.0;
    double rho_final = 100.0;

    int admm_iters = 500;
    double admm_tol = 1e-6;

    int sampler_projection_iters = 60;
    double sampler_projection_tol = 1e-9;

    std::vector<FeasibilityMethod> methods = {FeasibilityMethod::Unconstrained,
                                              FeasibilityMethod::Projected,
                                              FeasibilityMethod::Sal};
    std::uint64_t seed = 1;
    unsigned threads = 0;

    void validate() const {
        require(!obstacle_radii.empty(), "FeasibilityConfig: no obstacle radii");
        require(samples >= 1, "FeasibilityConfig: samples must be positive");
        require(obstacle_index >= 0 && obstacle_index < dynamics.steps,
                "FeasibilityConfig: obstacle index out of range");
        require(prior_trajectories >= 2 * dynamics.dim(),
                "FeasibilityConfig: prior ensemble too small");
    }
};

struct FeasibilityCell {
    FeasibilityMethod method;
    double radius = 0.0;
    long n = 0;
    long successes = 0;
    double rate = 0.0;
    WilsonInterval wilson;
    double mean_sample_dynamics_violation = 0.0;  // of the warm starts, pre-ADMM
    double max_sample_obstacle_violation = 0.0;
    // fraction of warm starts feasible to 1e-6; below 1 only when the
    // non-convex composed projection cycles instead of converging
    double warm_start_feasible_fraction = 1.0;
};

struct FeasibilityReport {
    std::vector<FeasibilityCell> cells;

    const FeasibilityCell& cell(FeasibilityMethod m, double r) const {
        for (const auto& c : cells) {
            if (c.method == m && c.radius == r) return c;
        }
        throw std::out_of_range("FeasibilityReport: no such cell");
    }
};

struct TrajectoryDump {
    FeasibilityMethod method;
    double radius;
    long sample_id;
    std::string phase;  // sampled | projected | admm_final
    Vec state;
};

inline std::mutex& dump_mutex() {
    static std::mutex m;
    return m;
}

inline FeasibilityReport run_feasibility_experiment(const FeasibilityConfig& config,
                                                    std::vector<TrajectoryDump>* dumps = nullptr,
                                                    int dump_count = 0) {
    config.validate();
    const DynamicsParams& p = config.dynamics;
    const int d = p.dim();

    GaussianSurrogate prior =
        build_trajectory_prior(p, config.prior_trajectories, config.seed + 101, config.threads);
    const NoiseSchedule schedule =
        ddpm_schedule(config.ddpm_steps, config.beta_start, config.beta_end);
    const TimeScoreField field = prior.annealed_field(schedule);
    auto dynamics = std::make_shared<DynamicsSet>(p);

    FeasibilityReport report;
    for (double radius : config.obstacle_radii) {
        std::vector<Obstacle> obs_list;
        if (radius > 0.0) {
            obs_list.push_back({config.obstacle_index, config.obstacle_center - radius,
                                config.obstacle_center + radius});
        }
        auto obstacles = std::make_shared<ObstacleSet>(d, obs_list);

        // flattened composition for the sampling-time projection
        std::vector<ConstraintPtr> members = {
            std::make_shared<SparseAffineConstraint>(dynamics_matrix(p), Vec::Zero(p.steps)),
            std::make_shared<BoxConstraint>(dynamics->box()), obstacles};
        auto sampling_set = std::make_shared<IntersectionSet>(
            members, config.sampler_projection_iters, config.sampler_projection_tol);

        for (FeasibilityMethod method : config.methods) {
            std::vector<char> success(config.samples, 0);
            std::vector<double> dyn_viol(config.samples, 0.0);
            std::vector<double> obs_viol(config.samples, 0.0);

            parallel_for(config.samples, config.threads, [&](std::size_t i) {
                SamplerConfig sampler;
                sampler.steps = config.ddpm_steps;
                sampler.seed = config.seed + 13 * (static_cast<int>(method) + 1) +
                               static_cast<std::uint64_t>(1000.0 * radius);
                sampler.stream = i;
                sampler.rho = config.rho;
                if (config.rho_final > config.rho) {
                    sampler.rho_schedule =
                        geometric_rho_ramp(config.rho, config.rho_final, sampler.steps);
                }
                RngStream init_rng(sampler.seed ^ 0xabcdef, i);
                const Vec x0 = init_rng.normal_vec(d);

                Vec warm;
                switch (method) {
                    case FeasibilityMethod::Unconstrained:
                        warm = time_dependent_chain(field, sampler, x0).final_point;
                        break;
                    case FeasibilityMethod::Projected:
                        warm = projected_time_dependent_chain(field, *sampling_set, sampler, x0)
                                   .final_point;
                        break;
                    case FeasibilityMethod::Sal:
                        warm = sal_time_dependent(field, *sampling_set, sampler, x0).z_final;
                        break;
                }
                if (method != FeasibilityMethod::Unconstrained) {
                    // converged final polish, alternating between the full
                    // dynamics set and the obstacle complement and ending on
                    // the obstacle: its violation is exactly zero and the
                    // dynamics residual is bounded by the displacement
                    // tolerance (best-effort when the geometry admits no
                    // nearby intersection point)
                    warm = alternating_projections({dynamics, obstacles}, warm, 100, 1e-9).point;
                }
                dyn_viol[i] = dynamics->violation(warm);
                obs_viol[i] = obstacles->violation(warm);

                AdmmResult admm = admm_feasibility(warm, *dynamics, *obstacles,
                                                   config.admm_iters, config.admm_tol);
                success[i] = admm.success ? 1 : 0;

                if (dumps && static_cast<int>(i) < dump_count) {
                    std::lock_guard<std::mutex> lock(dump_mutex());
                    dumps->push_back({method, radius, static_cast<long>(i), "sampled", warm});
                    dumps->push_back(
                        {method, radius, static_cast<long>(i), "admm_final", admm.point});
                }
            });

            FeasibilityCell cell;
            cell.method = method;
            cell.radius = radius;
            cell.n = config.samples;
            for (char s : success) cell.successes += s;
            cell.rate = static_cast<double>(cell.successes) / config.samples;
            cell.wilson = wilson_interval(cell.successes, cell.n);
            cell.mean_sample_dynamics_violation = mean(dyn_viol);
            long feasible = 0;
            for (std::size_t i = 0; i < dyn_viol.size(); ++i) {
                cell.max_sample_obstacle_violation =
                    std::max(cell.max_sample_obstacle_violation, obs_viol[i]);
                if (std::max(dyn_viol[i], obs_viol[i]) <= 1e-6) ++feasible;
            }
            cell.warm_start_feasible_fraction =
                static_cast<double>(feasible) / static_cast<double>(config.samples);
            report.cells.push_back(cell);
        }
    }
    return report;
}

}  // namespace sal::control
