#include <catch2/catch_amalgamated.hpp>

#include "sal/control/admm.hpp"
#include "sal/control/experiment.hpp"
#include "sal/control/trajectory.hpp"

#include "oracles/qp_oracle.hpp"

using namespace sal;
using namespace sal::control;

namespace {

DynamicsParams small_params() {
    DynamicsParams p;
    p.steps = 10;
    p.ds = 0.01;
    return p;
}

}  // namespace

TEST_CASE("simulated trajectories satisfy the discretized dynamics") {
    DynamicsParams p;
    p.steps = 200;
    const Eigen::SparseMatrix<double> A = dynamics_matrix(p);
    RngStream rng(3, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec x = sample_excited_trajectory(p, rng);
        REQUIRE((A * x).lpNorm<Eigen::Infinity>() <= 1e-8);
        REQUIRE(x.tail(p.steps).lpNorm<Eigen::Infinity>() <= p.u_max + 1e-12);
    }
    // zero excitation gives the zero trajectory
    const Vec y = simulate_states(p, Vec::Zero(p.steps));
    CHECK(y.norm() == 0.0);
}

TEST_CASE("dynamics projection basics") {
    DynamicsParams p = small_params();
    DynamicsSet set(p);

    // the origin is feasible and fixed
    const Vec zero = Vec::Zero(p.dim());
    CHECK((set.project(zero) - zero).lpNorm<Eigen::Infinity>() <= 1e-10);

    // feasible points are unchanged within tolerance
    RngStream rng(5, 0);
    const Vec feasible = sample_excited_trajectory(p, rng);
    CHECK((set.project(feasible) - feasible).lpNorm<Eigen::Infinity>() <= 1e-8);

    // projections land on the set: equality residual and exact box
    for (int trial = 0; trial < 10; ++trial) {
        const Vec x = 5.0 * rng.normal_vec(p.dim());
        const Vec proj = set.project(x);
        REQUIRE(set.equality_residual_inf(proj) <= 1e-8);
        REQUIRE(proj.tail(p.steps).lpNorm<Eigen::Infinity>() <= p.u_max);
        const Vec again = set.project(proj);
        REQUIRE((again - proj).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
}

TEST_CASE("dynamics projection agrees with the active-set oracle at S = 10") {
    DynamicsParams p = small_params();
    DynamicsSet set(p, 2000, 1e-12);
    const Mat A = Mat(dynamics_matrix(p));
    Vec lo = Vec::Constant(p.dim(), -1e300), hi = Vec::Constant(p.dim(), 1e300);
    lo.tail(p.steps).setConstant(-p.u_max);
    hi.tail(p.steps).setConstant(p.u_max);

    RngStream rng(7, 0);
    for (int trial = 0; trial < 25; ++trial) {
        // mix of mild and wild points so some control bounds go active
        const double scale = trial % 2 == 0 ? 3.0 : 40.0;
        const Vec x = scale * rng.normal_vec(p.dim());
        const Vec mine = set.project(x);
        const Vec expect = oracle::box_equality_projection(x, A, Vec::Zero(p.steps), lo, hi,
                                                           Vec::Zero(p.dim()));
        REQUIRE((mine - expect).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
}

TEST_CASE("obstacle set projection and violation") {
    ObstacleSet set(8, {{1, -0.5, 0.5}});
    Vec x = Vec::Zero(8);
    x[1] = 0.2;
    const Vec p = set.project(x);
    CHECK(p[1] == 0.5);  // nearer endpoint
    CHECK(set.violation(p) == 0.0);
    CHECK(set.violation(x) == Catch::Approx(0.3));
    x[1] = 0.0;  // exact midpoint ties to the lower endpoint
    CHECK(set.project(x)[1] == -0.5);
    CHECK_FALSE(set.convex());

    ObstacleSet empty(8, {});
    CHECK(empty.convex());
    CHECK((empty.project(x) - x).norm() == 0.0);
}

TEST_CASE("admm feasibility") {
    DynamicsParams p = small_params();
    DynamicsSet dynamics(p);

    SECTION("no obstacle: one projection suffices") {
        ObstacleSet obstacles(p.dim(), {});
        RngStream rng(11, 0);
        AdmmResult r = admm_feasibility(rng.normal_vec(p.dim()), dynamics, obstacles);
        CHECK(r.success);
        CHECK(r.iterations == 1);
        CHECK(r.dynamics_violation <= 1e-6);
    }

    SECTION("an unreachable obstacle forces failure") {
        // at s = 0.02 the state can barely move, so demanding |y| >= 5 is
        // impossible inside the control box
        ObstacleSet obstacles(p.dim(), {{2, -5.0, 5.0}});
        RngStream rng(13, 0);
        AdmmResult r = admm_feasibility(rng.normal_vec(p.dim()), dynamics, obstacles, 200);
        CHECK_FALSE(r.success);
        CHECK(r.iterations == 200);
        CHECK(r.obstacle_violation > 1e-3);
    }

    SECTION("residual trace settles for the convex instance") {
        ObstacleSet obstacles(p.dim(), {});
        RngStream rng(17, 0);
        AdmmResult r = admm_feasibility(10.0 * rng.normal_vec(p.dim()), dynamics, obstacles, 50);
        for (std::size_t i = 10; i + 1 < r.residual_trace.size(); ++i) {
            REQUIRE(r.residual_trace[i + 1] <= r.residual_trace[i] + 1e-12);
        }
        CHECK(r.success);
    }
}

TEST_CASE("trajectory prior statistics") {
    DynamicsParams p;
    p.steps = 40;  // keep the fit small
    const int n = 2000;
    GaussianSurrogate prior = build_trajectory_prior(p, n, 99, 2);

    // uniform phases make the mean control vanish
    const Vec mean_u = prior.mean().tail(p.steps);
    const Vec sd_u = prior.covariance().diagonal().tail(p.steps).cwiseSqrt();
    for (int i = 1; i < p.steps; ++i) {
        REQUIRE(std::abs(mean_u[i]) <= 5.0 * sd_u[i] / std::sqrt(static_cast<double>(n)));
    }
    CHECK_THROWS_AS(build_trajectory_prior(p, 10, 99, 2), std::invalid_argument);
}

TEST_CASE("feasibility experiment smoke run") {
    FeasibilityConfig config;
    config.dynamics.steps = 60;
    config.obstacle_index = 45;
    config.obstacle_radii = {0.0, 0.25};
    config.samples = 40;
    config.prior_trajectories = 300;
    config.ddpm_steps = 120;
    config.beta_start = 1e-4 * 1000.0 / 120.0;
    config.beta_end = 0.02 * 1000.0 / 120.0;
    config.methods = {FeasibilityMethod::Unconstrained, FeasibilityMethod::Sal};
    config.seed = 4;
    config.threads = 2;

    std::vector<TrajectoryDump> dumps;
    FeasibilityReport report = run_feasibility_experiment(config, &dumps, 2);
    REQUIRE(report.cells.size() == 4);

    const auto& free_unc = report.cell(FeasibilityMethod::Unconstrained, 0.0);
    const auto& free_sal = report.cell(FeasibilityMethod::Sal, 0.0);
    CHECK(free_unc.rate >= 0.99);
    CHECK(free_sal.rate >= 0.99);

    const auto& hard_sal = report.cell(FeasibilityMethod::Sal, 0.25);
    const auto& hard_unc = report.cell(FeasibilityMethod::Unconstrained, 0.25);
    // the polish ends on the obstacle, so its violation is exactly zero;
    // dynamics feasibility is best-effort under the non-convex composition
    CHECK(hard_sal.max_sample_obstacle_violation == 0.0);
    CHECK(hard_sal.warm_start_feasible_fraction >= 0.5);
    CHECK(hard_sal.mean_sample_dynamics_violation <= 0.15);
    CHECK(hard_sal.rate >= hard_unc.rate);

    CHECK_FALSE(dumps.empty());

    // Wilson intervals bracket the rates
    for (const auto& cell : report.cells) {
        REQUIRE(cell.wilson.lo <= cell.rate);
        REQUIRE(cell.wilson.hi >= cell.rate);
    }
}
