#include <catch2/catch_amalgamated.hpp>

#include "sal/burgers/assimilation.hpp"
#include "sal/burgers/experiment.hpp"
#include "sal/burgers/spectral.hpp"

#include <complex>

using namespace sal;
using namespace sal::burgers;

namespace {

// Dealiased pseudospectral oracle for the quadratic term: evaluate u and u_x
// on a 4K grid, multiply pointwise, and project back onto the retained modes
// by direct DFT. Independent of the library's truncated convolution.
Modes pseudospectral_rhs(const Modes& u, const BurgersParams& p) {
    const int K = static_cast<int>(u.size());
    const int M = 4 * K;
    std::vector<double> field(M, 0.0), slope(M, 0.0);
    for (int j = 0; j < M; ++j) {
        const double x = kDomainLength * j / M;
        std::complex<double> uval(0.0, 0.0), uxval(0.0, 0.0);
        for (int k = -(K - 1); k <= K - 1; ++k) {
            const std::complex<double> coeff = mode_at(u, k);
            const std::complex<double> phase = std::polar(1.0, k * x);
            uval += coeff * phase;
            uxval += std::complex<double>(0.0, static_cast<double>(k)) * coeff * phase;
        }
        field[j] = uval.real();
        slope[j] = uxval.real();
    }
    Modes out(K);
    for (int k = 0; k < K; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (int j = 0; j < M; ++j) {
            const double x = kDomainLength * j / M;
            acc += field[j] * slope[j] * std::polar(1.0, -k * x);
        }
        acc /= static_cast<double>(M);
        const double kk = static_cast<double>(k);
        out[k] = -acc - p.nu * kk * kk * u[k] -
                 std::complex<double>(0.0, p.advection * kk) * u[k];
    }
    return out;
}

Modes smooth_test_state(int modes, std::uint64_t seed) {
    RngStream rng(seed, 0);
    return sample_initial_condition(rng, modes, 2.0, 0.5);
}

}  // namespace

TEST_CASE("rhs worked examples") {
    BurgersParams p;
    p.modes = 8;

    CHECK(rhs(Modes::Zero(8), p).norm() == 0.0);

    // single mode with the nonlinearity off decays and rotates linearly
    BurgersParams lin = p;
    lin.nonlinear = false;
    lin.nu = 0.3;
    lin.advection = 1.5;
    Modes u = Modes::Zero(8);
    u[1] = Complex(0.4, -0.2);
    const Modes d = rhs(u, lin);
    const Complex expect = (-lin.nu - Complex(0.0, lin.advection)) * u[1];
    CHECK(std::abs(d[1] - expect) <= 1e-14);
    for (int k = 0; k < 8; ++k) {
        if (k != 1) REQUIRE(std::abs(d[k]) <= 1e-14);
    }
}

TEST_CASE("rhs matches the dealiased pseudospectral oracle") {
    BurgersParams p;
    p.modes = 12;
    p.nu = 0.02;
    p.advection = 1.0;
    RngStream rng(404, 0);
    for (int trial = 0; trial < 5; ++trial) {
        const Modes u = sample_initial_condition(rng, p.modes, 1.2, 1.0);
        const Modes mine = rhs(u, p);
        const Modes oracle = pseudospectral_rhs(u, p);
        REQUIRE((mine - oracle).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + oracle.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("rk4 exactness and analytic limits") {
    SECTION("no dynamics at all: state is preserved exactly") {
        BurgersParams p;
        p.modes = 6;
        p.nu = 0.0;
        p.advection = 0.0;
        p.nonlinear = false;
        const Modes u0 = smooth_test_state(6, 5);
        const Modes u1 = integrate_rk4(u0, 1.0, 1e-3, p);
        CHECK((u1 - u0).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("heat-equation limit matches the analytic decay") {
        BurgersParams p;
        p.modes = 20;
        p.nu = 0.01;
        p.advection = 0.0;
        p.nonlinear = false;
        const Modes u0 = smooth_test_state(20, 6);
        const Modes u1 = integrate_rk4(u0, 1.0, 1e-3, p);
        for (int k = 0; k < 20; ++k) {
            const Complex expect = u0[k] * std::exp(-p.nu * k * k * 1.0);
            const double rel = std::abs(u1[k] - expect) / std::max(1e-30, std::abs(expect));
            REQUIRE(rel <= 1e-8);
        }
    }

    SECTION("fourth-order self convergence on the full model") {
        BurgersParams p;
        p.modes = 16;
        p.nu = 0.01;
        p.advection = 1.0;
        const Modes u0 = smooth_test_state(16, 7);
        const Modes reference = integrate_rk4(u0, 0.5, 1e-5, p);
        const double err_coarse = (integrate_rk4(u0, 0.5, 2e-3, p) - reference).norm();
        const double err_fine = (integrate_rk4(u0, 0.5, 1e-3, p) - reference).norm();
        const double ratio = err_coarse / err_fine;
        CHECK(ratio >= 14.0);
        CHECK(ratio <= 18.0);
    }

    SECTION("blow-up names the failing step") {
        // wildly under-resolved step on a huge state: RK4 goes unstable
        BurgersParams p;
        p.modes = 8;
        p.nu = 0.01;
        Modes u0 = Modes::Zero(8);
        u0[1] = Complex(2000.0, 0.0);
        CHECK_THROWS_WITH(integrate_rk4(u0, 10.0, 0.1, p),
                          Catch::Matchers::ContainsSubstring("blow-up at step"));
    }
}

TEST_CASE("conservation of the forecast model") {
    BurgersParams p;
    p.modes = 20;
    p.nu = 0.01;
    p.advection = 1.0;
    const Modes u0 = smooth_test_state(20, 8);

    SECTION("mass drift stays at rounding level") {
        const Modes u1 = integrate_rk4(u0, 1.0, 1e-3, p);
        CHECK(std::abs(mass(u1) - mass(u0)) <= 1e-10 * (1.0 + std::abs(mass(u0))));
    }

    SECTION("inviscid energy drift per time unit") {
        BurgersParams inviscid = p;
        inviscid.nu = 0.0;
        const Modes u1 = integrate_rk4(u0, 1.0, 1e-3, inviscid);
        CHECK(std::abs(energy(u1) - energy(u0)) / energy(u0) <= 1e-6);
    }
}

TEST_CASE("initial condition sampling") {
    RngStream rng(11, 0);
    CHECK(sample_initial_condition(rng, 10, 1.5, 0.0).norm() == 0.0);
    CHECK_THROWS_AS(sample_initial_condition(rng, 10, 0.4, 1.0), std::invalid_argument);

    // spectrum: E |u_k|^2 = A^2 k^{-2 gamma}
    const double gamma = 1.5, amplitude = 0.8;
    const int draws = 10000, modes = 8;
    Vec acc = Vec::Zero(modes);
    for (int i = 0; i < draws; ++i) {
        const Modes u = sample_initial_condition(rng, modes, gamma, amplitude);
        for (int k = 1; k < modes; ++k) acc[k] += std::norm(u[k]);
    }
    for (int k = 1; k < modes; ++k) {
        const double expect = amplitude * amplitude * std::pow(static_cast<double>(k), -2.0 * gamma);
        REQUIRE(std::abs(acc[k] / draws - expect) <= 0.05 * expect);
    }

    // the implied full Fourier sum is real up to rounding
    const Modes u = sample_initial_condition(rng, modes, gamma, amplitude);
    for (int j = 0; j < 16; ++j) {
        const double x = kDomainLength * j / 16;
        std::complex<double> full(0.0, 0.0);
        for (int k = -(modes - 1); k <= modes - 1; ++k) full += mode_at(u, k) * std::polar(1.0, k * x);
        REQUIRE(std::abs(full.imag()) <= 1e-12);
        REQUIRE(std::abs(full.real() - evaluate(u, x)) <= 1e-12);
    }
}

TEST_CASE("real parametrization round trip and functionals") {
    RngStream rng(13, 0);
    const Modes u = sample_initial_condition(rng, 20, 1.5, 1.0);
    const Vec y = modes_to_real(u);
    CHECK(y.size() == 39);
    const Modes back = real_to_modes(y);
    CHECK((back - u).cwiseAbs().maxCoeff() <= 1e-14);

    CHECK(mass_real(y) == Catch::Approx(mass(u)).margin(1e-12));
    CHECK(energy_real(y) == Catch::Approx(energy(u)).epsilon(1e-12));

    // observation rows reproduce point evaluation
    for (double loc : {0.0, 1.0, 2.5}) {
        CHECK(observation_row(20, loc).dot(y) == Catch::Approx(evaluate(u, loc)).margin(1e-12));
    }
}

TEST_CASE("threedvar analysis") {
    SECTION("scalar equal-weight average") {
        ThreeDVarResult r = threedvar_analysis(Vec::Zero(1), Mat::Identity(1, 1),
                                               Vec::Ones(1), Mat::Identity(1, 1),
                                               Mat::Identity(1, 1));
        CHECK(r.analysis[0] == Catch::Approx(0.5).margin(1e-12));
        CHECK(r.posterior_cov(0, 0) == Catch::Approx(0.5).margin(1e-12));
    }

    SECTION("uninformative observations return the background") {
        const Vec b = Vec::Constant(3, 0.7);
        Mat H(1, 3);
        H << 1.0, 0.5, -0.25;
        ThreeDVarResult r = threedvar_analysis(b, Mat::Identity(3, 3), Vec::Ones(1),
                                               Mat::Constant(1, 1, 1e14), H);
        CHECK((r.analysis - b).lpNorm<Eigen::Infinity>() <= 1e-10);
    }

    SECTION("first-order optimality of J on a random instance") {
        RngStream rng(17, 0);
        const int d = 8, m = 3;
        Mat root = Mat::NullaryExpr(d, d, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
        const Mat B = root * root.transpose() + Mat::Identity(d, d);
        Mat H = Mat::NullaryExpr(m, d, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
        const Mat P = 0.25 * Mat::Identity(m, m);
        const Vec b = rng.normal_vec(d);
        const Vec y = rng.normal_vec(m);
        ThreeDVarResult r = threedvar_analysis(b, B, y, P, H);

        // grad J = -H^T P^-1 (y - Hx) + B^-1 (x - b)
        const Vec grad = -H.transpose() * P.llt().solve(y - H * r.analysis) +
                         B.llt().solve(r.analysis - b);
        CHECK(grad.norm() <= 1e-9);
    }

    SECTION("singular innovation is an error") {
        CHECK_THROWS_WITH(threedvar_analysis(Vec::Zero(2), Mat::Zero(2, 2), Vec::Zero(1),
                                             Mat::Zero(1, 1), Mat::Zero(1, 2)),
                          Catch::Matchers::ContainsSubstring("singular"));
    }
}

TEST_CASE("gaussian surrogate fitting") {
    SECTION("degenerate ensemble hits the eigenvalue floor") {
        std::vector<Vec> ensemble(10, Vec::Constant(3, 2.0));
        GaussianSurrogate s = GaussianSurrogate::fit(ensemble);
        for (int i = 0; i < 3; ++i) REQUIRE(s.eigenvalues()[i] == s.lambda_min());
        CHECK((s.mean() - Vec::Constant(3, 2.0)).norm() <= 1e-12);
    }

    SECTION("fit on a known gaussian recovers the mean within 5 sigma") {
        RngStream rng(19, 0);
        Vec m(3);
        m << 1.0, -2.0, 0.5;
        const int n = 10000;
        std::vector<Vec> ensemble;
        for (int i = 0; i < n; ++i) {
            Vec x = m;
            x[0] += 0.5 * rng.normal();
            x[1] += 1.5 * rng.normal();
            x[2] += 0.8 * rng.normal();
            ensemble.push_back(x);
        }
        GaussianSurrogate s = GaussianSurrogate::fit(ensemble);
        const Vec sd = s.covariance().diagonal().cwiseSqrt();
        for (int i = 0; i < 3; ++i) {
            REQUIRE(std::abs(s.mean()[i] - m[i]) <= 5.0 * sd[i] / std::sqrt(n));
        }

        // too-small ensembles are rejected
        ensemble.resize(5);
        CHECK_THROWS_AS(GaussianSurrogate::fit(ensemble), std::invalid_argument);
    }

    SECTION("perturbed score equals the convolved gaussian's score") {
        RngStream rng(23, 0);
        Vec m(2);
        m << 0.3, -0.6;
        Mat cov(2, 2);
        cov << 0.5, 0.2, 0.2, 0.8;
        GaussianSurrogate s(m, cov, 0.0);
        for (double ab : {0.9, 0.5, 0.05}) {
            const Mat perturbed = ab * cov + (1.0 - ab) * Mat::Identity(2, 2);
            for (int i = 0; i < 20; ++i) {
                const Vec x = rng.normal_vec(2);
                const Vec expect = perturbed.llt().solve(x - std::sqrt(ab) * m);
                REQUIRE((s.perturbed_grad(x, ab) - expect).norm() <= 1e-10);
            }
        }
    }
}

TEST_CASE("constraint builders for the assimilation state") {
    const int d = 11;  // K = 6
    ConstraintPtr both = build_constraint_set(ConstraintMode::MassAndEnergy, d, 1.3, 4.0);
    RngStream rng(29, 0);
    const Vec y = 3.0 * rng.normal_vec(d);
    const Vec p = both->project(y);
    CHECK(std::abs(mass_real(p) - 1.3) <= 1e-8);
    CHECK(std::abs(energy_real(p) - 4.0) <= 1e-8);

    EqualityConstraint h = build_equality(ConstraintMode::MassAndEnergy, d, 1.3, 4.0);
    CHECK(h.h_at(p).lpNorm<Eigen::Infinity>() <= 1e-8);
    const Mat J = h.jacobian_at(p);
    CHECK(J.rows() == 2);
    CHECK(J(0, 0) == Catch::Approx(std::sqrt(kDomainLength)));
}

TEST_CASE("small assimilation run conserves what it should") {
    DaConfig config;
    config.model.modes = 6;
    config.dt = 2e-3;
    config.horizon = 1.0;
    config.cycles = 2;
    config.observation_times = 2;
    config.trajectories = 2;
    config.training_trajectories = 12;
    config.training_snapshots = 10;
    config.posterior_samples = 2;
    config.ddpm_steps = 200;
    config.methods = {DaMethod::ThreeDVar, DaMethod::Unconstrained, DaMethod::Sal};
    config.seed = 5;
    config.threads = 2;

    DaReport report = run_da_experiment(config);
    REQUIRE(report.per_trajectory.size() == 3);

    const auto sal_means = report.cycle_means(DaMethod::Sal);
    const auto unc_means = report.cycle_means(DaMethod::Unconstrained);
    REQUIRE(sal_means.size() == 2);
    for (const auto& c : sal_means) {
        REQUIRE(c.mass_violation_sq <= 1e-16);
        REQUIRE(c.energy_violation_sq <= 1e-16);
        REQUIRE(std::isfinite(c.l2_error));
    }
    // the unconstrained sampler leaves the constraint set
    CHECK(unc_means.back().energy_violation_sq > 1e-6);

    // determinism of the whole experiment
    DaReport again = run_da_experiment(config);
    CHECK(again.cycle_means(DaMethod::Sal)[1].l2_error ==
          report.cycle_means(DaMethod::Sal)[1].l2_error);
}

TEST_CASE("fully observed noise-free limit pins the analysis to the truth") {
    // With H = I and tiny P the variational analysis must reproduce the
    // observed state regardless of the background.
    const int d = 7;
    RngStream rng(31, 0);
    const Vec truth = rng.normal_vec(d);
    const Vec background = truth + rng.normal_vec(d);
    Mat root = Mat::NullaryExpr(d, d, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
    const Mat B = root * root.transpose() + 0.5 * Mat::Identity(d, d);
    ThreeDVarResult r = threedvar_analysis(background, B, truth, 1e-12 * Mat::Identity(d, d),
                                           Mat::Identity(d, d));
    const double analysis_error = (r.analysis - truth).norm();
    const double forecast_error = (background - truth).norm();
    CHECK(analysis_error <= 1e-6);
    CHECK(analysis_error <= forecast_error);
}
