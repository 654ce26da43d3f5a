#include <catch2/catch_amalgamated.hpp>

#include "sal/core/finite_diff.hpp"
#include "sal/core/gaussian_mixture.hpp"
#include "sal/core/rng.hpp"
#include "sal/samplers/langevin.hpp"

#include <cmath>
#include <vector>

using namespace sal;

namespace {

// Test-side density of the 1D bimodal instance, written out directly so the
// finite-difference oracle below is independent of GaussianMixture.
double bimodal_1d_potential(double x) {
    const double n1 = std::exp(-0.5 * (x - 1.0) * (x - 1.0) / 0.01) / std::sqrt(2.0 * M_PI * 0.01);
    const double n2 = std::exp(-0.5 * (x + 1.0) * (x + 1.0) / 0.25) / std::sqrt(2.0 * M_PI * 0.25);
    return -std::log(0.5 * n1 + 0.5 * n2);
}

GaussianMixture bimodal_1d() {
    Vec m1 = Vec::Constant(1, 1.0), m2 = Vec::Constant(1, -1.0);
    Mat c1 = Mat::Constant(1, 1, 0.01), c2 = Mat::Constant(1, 1, 0.25);
    return GaussianMixture({0.5, 0.5}, {m1, m2}, {c1, c2});
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
    RngStream a(42, 3), b(42, 3), c(42, 4);
    bool same = true, differ = false;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t va = a.next_u64();
        same = same && (va == b.next_u64());
        differ = differ || (va != c.next_u64());
    }
    CHECK(same);
    CHECK(differ);
}

TEST_CASE("rng streams look independent") {
    RngStream a(7, 0), b(7, 1);
    const int n = 200000;
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = a.uniform(), y = b.uniform();
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double mx = sx / n, my = sy / n;
    const double corr =
        (sxy / n - mx * my) / std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
    CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(mx - 0.5) < 0.005);
}

TEST_CASE("rng normal moments") {
    RngStream rng(11, 0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / n) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("single gaussian score is the whitened residual") {
    // N(0, I) at x = (1, 2): grad f = x.
    GaussianMixture g = GaussianMixture::single(Vec::Zero(2), Mat::Identity(2, 2));
    Vec x(2);
    x << 1.0, 2.0;
    CHECK((gaussian_mixture_score(g, x) - x).norm() <= 1e-10);

    // gradient vanishes at the mode
    Vec m(2);
    m << 0.4, -2.0;
    Mat cov(2, 2);
    cov << 0.5, 0.1, 0.1, 0.3;
    GaussianMixture g2 = GaussianMixture::single(m, cov);
    CHECK(gaussian_mixture_score(g2, m).norm() <= 1e-10);
}

TEST_CASE("bimodal 1d score at the origin matches the finite-difference oracle") {
    GaussianMixture mix = bimodal_1d();
    const double got = mix.score(Vec::Zero(1))[0];

    // oracle: central differences on the test-side potential
    const double h = 1e-6;
    const double fd = (bimodal_1d_potential(h) - bimodal_1d_potential(-h)) / (2.0 * h);
    CHECK(got == Catch::Approx(fd).margin(1e-6));

    // frozen value: the concentrated positive mode is ~e^{-48} lighter at 0,
    // so the score is the negative component's alone: (0 - (-1)) / 0.25 = 4.
    CHECK(got == Catch::Approx(4.0).margin(1e-12));
}

TEST_CASE("mixture constructor validates inputs") {
    Vec m = Vec::Zero(1);
    Mat c = Mat::Constant(1, 1, 1.0);
    CHECK_THROWS_AS(GaussianMixture({0.6, 0.6}, {m, m}, {c, c}), std::invalid_argument);
    Mat bad = Mat::Constant(1, 1, -1.0);
    CHECK_THROWS_AS(GaussianMixture::single(m, bad), std::invalid_argument);
    GaussianMixture g = bimodal_1d();
    CHECK_THROWS_AS(g.score(Vec::Zero(2)), std::invalid_argument);
}

TEST_CASE("finite difference check") {
    ScoreField quad;
    quad.dim = 3;
    quad.potential = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
    quad.grad = [](const Vec& x) { return x; };

    RngStream rng(5, 0);
    std::vector<Vec> points;
    for (int i = 0; i < 50; ++i) points.push_back(rng.normal_vec(3));

    SECTION("quadratic is exact to rounding") {
        CHECK(finite_difference_check(quad, points, 1e-5) <= 1e-8);
    }
    SECTION("a deliberately doubled gradient is flagged") {
        ScoreField wrong = quad;
        wrong.grad = [](const Vec& x) { return Vec(2.0 * x); };
        std::vector<Vec> unit_points;
        for (const Vec& p : points) unit_points.push_back(p.normalized());
        // on unit-norm points the relative factor is exactly 1/2
        const double err = finite_difference_check(wrong, unit_points, 1e-5);
        CHECK(err > 0.4);
        CHECK(err < 0.6);
    }
    SECTION("missing potential is an error") {
        ScoreField no_pot;
        no_pot.dim = 3;
        no_pot.grad = [](const Vec& x) { return x; };
        CHECK_THROWS_AS(finite_difference_check(no_pot, points, 1e-5), std::invalid_argument);
    }
}

TEST_CASE("built-in mixture fields pass the gradient check at 100 random points") {
    GaussianMixture mix = bimodal_1d();
    ScoreField field = mix.score_field();
    RngStream rng(17, 0);
    std::vector<Vec> points;
    for (int i = 0; i < 100; ++i) points.push_back(Vec::Constant(1, rng.uniform(-2.5, 2.5)));
    CHECK(finite_difference_check(field, points, 1e-5) <= 1e-4);

    Vec m1(2), m2(2);
    m1 << 1.0, 0.5;
    m2 << -1.0, -0.2;
    Mat c1(2, 2), c2(2, 2);
    c1 << 0.3, 0.05, 0.05, 0.2;
    c2 << 0.6, -0.1, -0.1, 0.4;
    GaussianMixture mix2({0.3, 0.7}, {m1, m2}, {c1, c2});
    ScoreField field2 = mix2.score_field();
    std::vector<Vec> points2;
    for (int i = 0; i < 100; ++i) points2.push_back(rng.normal_vec(2));
    CHECK(finite_difference_check(field2, points2, 1e-5) <= 1e-4);
}

TEST_CASE("mixture density integrates to one on a bounding box") {
    // trapezoid rule, 400^2 grid
    GaussianMixture mix = bimodal_1d();
    {
        const int n = 400;
        const double lo = -8.0, hi = 8.0, dx = (hi - lo) / (n - 1);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            acc += w * std::exp(mix.log_pdf(Vec::Constant(1, lo + i * dx)));
        }
        CHECK(acc * dx == Catch::Approx(1.0).margin(1e-3));
    }
    {
        Vec m1(2), m2(2);
        m1 << 1.0, 0.0;
        m2 << -1.0, 0.3;
        Mat c1 = 0.2 * Mat::Identity(2, 2), c2 = 0.5 * Mat::Identity(2, 2);
        GaussianMixture mix2({0.4, 0.6}, {m1, m2}, {c1, c2});
        const int n = 400;
        const double lo = -6.0, hi = 6.0, dx = (hi - lo) / (n - 1);
        double acc = 0.0;
        Vec x(2);
        for (int i = 0; i < n; ++i) {
            const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            x[0] = lo + i * dx;
            for (int j = 0; j < n; ++j) {
                const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
                x[1] = lo + j * dx;
                acc += wi * wj * std::exp(mix2.log_pdf(x));
            }
        }
        CHECK(acc * dx * dx == Catch::Approx(1.0).margin(1e-3));
    }
}

TEST_CASE("exact sampling agrees with the analytic mean") {
    Vec m1(3), m2(3);
    m1 << 1.0, -0.5, 0.2;
    m2 << -1.0, 0.5, 0.0;
    Mat c1 = 0.4 * Mat::Identity(3, 3), c2 = 0.8 * Mat::Identity(3, 3);
    GaussianMixture mix({0.25, 0.75}, {m1, m2}, {c1, c2});
    RngStream rng(23, 0);
    const int n = 40000;
    Vec acc = Vec::Zero(3), acc2 = Vec::Zero(3);
    for (int i = 0; i < n; ++i) {
        Vec x = mix.sample(rng);
        acc += x;
        acc2 += x.cwiseProduct(x);
    }
    const Vec mc_mean = acc / n;
    const Vec mean = mix.mean();
    for (int k = 0; k < 3; ++k) {
        const double var = acc2[k] / n - mc_mean[k] * mc_mean[k];
        const double se = std::sqrt(var / n);
        CHECK(std::abs(mc_mean[k] - mean[k]) <= 5.0 * se);
    }
}

TEST_CASE("chains are bit-identical for identical configs") {
    GaussianMixture mix = bimodal_1d();
    ScoreField field = mix.score_field();
    SamplerConfig config;
    config.tau = 1e-3;
    config.steps = 500;
    config.seed = 99;
    config.stream = 4;
    const Vec x0 = Vec::Constant(1, 0.3);
    ChainResult a = ula_chain(field, config, x0);
    ChainResult b = ula_chain(field, config, x0);
    CHECK(a.final_point == b.final_point);
}
