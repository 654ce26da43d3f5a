#pragma once

// Sample statistics and comparison metrics: exact 1D Wasserstein-1 distance,
// constraint-violation summaries, mode fractions, histograms, bootstrap
// standard errors and the hypothesis tests used by the experiment harness.

#include "sal/common.hpp"
#include "sal/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace sal {

// ---------------------------------------------------------------------------
// special functions (for p-values)
// ---------------------------------------------------------------------------

namespace special {

inline double log_gamma(double x) { return std::lgamma(x); }

// Regularized incomplete gamma P(a, x), series + continued fraction.
inline double gamma_p(double a, double x) {
    require(a > 0.0 && x >= 0.0, "gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
    // continued fraction for Q, return 1 - Q
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
    return 1.0 - q;
}

// Regularized incomplete beta I_x(a, b) via continued fraction.
inline double betacf(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < 1e-300) d = 1e-300;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return h;
}

inline double inc_beta(double a, double b, double x) {
    require(x >= 0.0 && x <= 1.0, "inc_beta: x out of range");
    if (x == 0.0 || x == 1.0) return x;
    const double ln_front =
        log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(T <= t) for Student's t with nu degrees of freedom.
inline double student_t_cdf(double t, double nu) {
    const double x = nu / (nu + t * t);
    const double tail = 0.5 * inc_beta(0.5 * nu, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

// Upper tail of the chi-square distribution with k dof.
inline double chi_square_p_value(double stat, int dof) {
    return 1.0 - gamma_p(0.5 * dof, 0.5 * stat);
}

// Asymptotic two-sample Kolmogorov distribution tail.
inline double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace special

// ---------------------------------------------------------------------------
// scalar summaries
// ---------------------------------------------------------------------------

inline double mean(const std::vector<double>& v) {
    require(!v.empty(), "mean: empty input");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    require(v.size() >= 2, "variance: need at least two points");
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size() - 1);
}

inline double standard_error(const std::vector<double>& v) {
    return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

// Empirical quantile with linear interpolation, q in [0, 1].
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    require(!sorted.empty(), "quantile: empty input");
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// ---------------------------------------------------------------------------
// Wasserstein-1 on the line
// ---------------------------------------------------------------------------

// Exact W1 between empirical distributions via the sorted coupling; unequal
// sizes are resampled to a common size by quantile interpolation.
inline double wasserstein1_1d(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), "wasserstein1_1d: empty input");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.size() == b.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
        return acc / static_cast<double>(a.size());
    }
    const std::size_t m = std::max(a.size(), b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
        acc += std::abs(quantile_sorted(a, q) - quantile_sorted(b, q));
    }
    return acc / static_cast<double>(m);
}

// ---------------------------------------------------------------------------
// constraint violation summaries
// ---------------------------------------------------------------------------

struct ViolationStats {
    double mean = 0.0;
    double max = 0.0;
    double fraction_exceeding = 0.0;  // fraction with violation > tol
    double mean_squared = 0.0;
    double stddev = 0.0;
};

inline ViolationStats violation_stats_from_values(const std::vector<double>& v,
                                                  double tol = kProjTol) {
    require(!v.empty(), "violation_stats: empty input");
    ViolationStats s;
    double acc = 0.0, acc2 = 0.0;
    int over = 0;
    for (double x : v) {
        acc += x;
        acc2 += x * x;
        s.max = std::max(s.max, x);
        if (x > tol) ++over;
    }
    const double n = static_cast<double>(v.size());
    s.mean = acc / n;
    s.mean_squared = acc2 / n;
    s.fraction_exceeding = static_cast<double>(over) / n;
    s.stddev = v.size() > 1 ? std::sqrt(std::max(0.0, (acc2 - n * s.mean * s.mean) / (n - 1.0)))
                            : 0.0;
    return s;
}

inline ViolationStats constraint_violation_stats(const std::vector<Vec>& samples,
                                                 const std::function<double(const Vec&)>& violation,
                                                 double tol = kProjTol) {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const Vec& x : samples) v.push_back(violation(x));
    return violation_stats_from_values(v, tol);
}

// Fraction of samples with c(x) < threshold.
inline double mode_fraction(const std::vector<Vec>& samples,
                            const std::function<double(const Vec&)>& coordinate,
                            double threshold) {
    require(!samples.empty(), "mode_fraction: empty input");
    std::size_t count = 0;
    for (const Vec& x : samples) {
        if (coordinate(x) < threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(samples.size());
}

// ---------------------------------------------------------------------------
// histograms
// ---------------------------------------------------------------------------

struct Histogram {
    std::vector<double> edges;   // size bins + 1
    std::vector<long> counts;    // size bins
};

inline Histogram histogram(const std::vector<double>& values, double lo, double hi, int bins) {
    require(bins >= 1 && hi > lo, "histogram: bad bin specification");
    Histogram h;
    h.edges.resize(bins + 1);
    h.counts.assign(bins, 0);
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
    for (double v : values) {
        if (v < lo || v > hi) continue;
        int bin = static_cast<int>((v - lo) / (hi - lo) * bins);
        bin = std::clamp(bin, 0, bins - 1);
        ++h.counts[bin];
    }
    return h;
}

// ---------------------------------------------------------------------------
// resampling and tests
// ---------------------------------------------------------------------------

// Bootstrap standard error of a statistic of one sample set.
inline double bootstrap_se(const std::vector<double>& sample,
                           const std::function<double(const std::vector<double>&)>& statistic,
                           int replicates, RngStream& rng) {
    require(!sample.empty(), "bootstrap_se: empty input");
    std::vector<double> stats;
    stats.reserve(replicates);
    std::vector<double> draw(sample.size());
    for (int b = 0; b < replicates; ++b) {
        for (std::size_t i = 0; i < sample.size(); ++i) draw[i] = sample[rng.index(sample.size())];
        stats.push_back(statistic(draw));
    }
    return std::sqrt(variance(stats));
}

// Bootstrap standard error of a two-sample statistic (both sets resampled).
inline double bootstrap_se2(
    const std::vector<double>& a, const std::vector<double>& b,
    const std::function<double(const std::vector<double>&, const std::vector<double>&)>& statistic,
    int replicates, RngStream& rng) {
    require(!a.empty() && !b.empty(), "bootstrap_se2: empty input");
    std::vector<double> stats;
    stats.reserve(replicates);
    std::vector<double> ra(a.size()), rb(b.size());
    for (int r = 0; r < replicates; ++r) {
        for (std::size_t i = 0; i < a.size(); ++i) ra[i] = a[rng.index(a.size())];
        for (std::size_t i = 0; i < b.size(); ++i) rb[i] = b[rng.index(b.size())];
        stats.push_back(statistic(ra, rb));
    }
    return std::sqrt(variance(stats));
}

// Two-sample Kolmogorov-Smirnov test; returns the asymptotic p-value.
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), "ks_two_sample_p: empty input");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return special::kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

// Chi-square goodness-of-fit p-value against uniform expected counts.
inline double chi_square_uniform_p(const std::vector<long>& counts) {
    require(counts.size() >= 2, "chi_square_uniform_p: need at least two bins");
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0L));
    require(total > 0.0, "chi_square_uniform_p: empty counts");
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (long c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return special::chi_square_p_value(stat, static_cast<int>(counts.size()) - 1);
}

// Wilson 95% score interval for a binomial proportion.
struct WilsonInterval {
    double lo = 0.0, hi = 1.0;
};

inline WilsonInterval wilson_interval(long successes, long n, double z = 1.959963984540054) {
    require(n > 0 && successes >= 0 && successes <= n, "wilson_interval: bad counts");
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    const double z2 = z * z, nn = static_cast<double>(n);
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// One-sided two-proportion z-test of H1: p1 > p2; returns the p-value.
inline double two_proportion_p_value(long s1, long n1, long s2, long n2) {
    require(n1 > 0 && n2 > 0, "two_proportion_p_value: empty groups");
    const double p1 = static_cast<double>(s1) / n1, p2 = static_cast<double>(s2) / n2;
    const double pooled = static_cast<double>(s1 + s2) / static_cast<double>(n1 + n2);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    if (se == 0.0) return p1 > p2 ? 0.0 : 1.0;
    const double z = (p1 - p2) / se;
    return 1.0 - special::normal_cdf(z);
}

// One-sided paired t-test of H1: mean(a - b) < 0; returns the p-value.
inline double paired_t_p_value_less(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size() && a.size() >= 2, "paired_t_p_value_less: bad inputs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double se = standard_error(d);
    if (se == 0.0) return mean(d) < 0.0 ? 0.0 : 1.0;
    const double t = mean(d) / se;
    return special::student_t_cdf(t, static_cast<double>(d.size() - 1));
}

}  // namespace sal
