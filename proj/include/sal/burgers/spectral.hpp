#pragma once

// Truncated Fourier (Galerkin) model of the viscous Burgers equation with a
// constant advection term,
//
//   u_t + u u_x + c u_x = nu u_xx   on [0, 2 pi), periodic,
//
// storing modes k = 0..K-1 of a real field (negative modes implied by
// conjugate symmetry). The quadratic term is an explicit truncated
// convolution, which is exactly the Galerkin projection of u u_x: the k = 0
// derivative vanishes identically (mass is conserved to rounding) and the
// inviscid nonlinearity conserves energy in continuous time, so any energy
// drift measures the time integrator alone.

#include "sal/common.hpp"
#include "sal/core/rng.hpp"

#include <complex>
#include <vector>

namespace sal::burgers {

using Modes = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kDomainLength = 2.0 * M_PI;

struct BurgersParams {
    int modes = 20;          // K
    double nu = 0.01;        // viscosity
    double advection = 1.0;  // constant transport speed c
    bool nonlinear = true;   // test hook: drop u u_x to expose the linear solution
};

// mass functional m(u) = integral of u = L * Re u_0
inline double mass(const Modes& u) { return kDomainLength * u[0].real(); }

// energy functional E(u) = 1/2 integral of u^2 (Parseval weights)
inline double energy(const Modes& u) {
    double acc = u[0].real() * u[0].real() + u[0].imag() * u[0].imag();
    for (Eigen::Index k = 1; k < u.size(); ++k) acc += 2.0 * std::norm(u[k]);
    return 0.5 * kDomainLength * acc;
}

// field value at location x
inline double evaluate(const Modes& u, double x) {
    double acc = u[0].real();
    for (Eigen::Index k = 1; k < u.size(); ++k) {
        const double kk = static_cast<double>(k);
        acc += 2.0 * (u[k].real() * std::cos(kk * x) - u[k].imag() * std::sin(kk * x));
    }
    return acc;
}

inline Vec evaluate_grid(const Modes& u, int n) {
    Vec out(n);
    for (int j = 0; j < n; ++j) out[j] = evaluate(u, kDomainLength * j / n);
    return out;
}

// mode access with implied conjugate symmetry: u_{-k} = conj(u_k)
inline Complex mode_at(const Modes& u, Eigen::Index k) {
    if (k >= 0) return k < u.size() ? u[k] : Complex(0.0, 0.0);
    return -k < u.size() ? std::conj(u[-k]) : Complex(0.0, 0.0);
}

// d u_k / dt
inline Modes rhs(const Modes& u, const BurgersParams& p) {
    require(u.size() == p.modes, "burgers rhs: mode count mismatch");
    require(p.nu >= 0.0, "burgers rhs: viscosity must be nonnegative");
    const Eigen::Index K = u.size();
    Modes out(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        Complex value(0.0, 0.0);
        if (p.nonlinear && k > 0) {
            // (u^2)_k by truncated convolution over |p|, |k-p| < K
            Complex conv(0.0, 0.0);
            for (Eigen::Index q = k - (K - 1); q <= K - 1; ++q) {
                conv += mode_at(u, q) * mode_at(u, k - q);
            }
            value -= Complex(0.0, 0.5 * static_cast<double>(k)) * conv;
        }
        const double kk = static_cast<double>(k);
        value -= p.nu * kk * kk * u[k];
        value -= Complex(0.0, p.advection * kk) * u[k];
        out[k] = value;
    }
    return out;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<Modes> states;
};

// Classical fourth-order Runge-Kutta over [0, span] in steps of dt (span
// must be an integer multiple of dt). Aborts if any mode magnitude passes
// the blow-up guard.
inline Modes integrate_rk4(const Modes& u0, double span, double dt, const BurgersParams& p,
                           Trajectory* record = nullptr, int record_every = 0) {
    require(dt > 0.0, "integrate_rk4: dt must be positive");
    require(span >= 0.0, "integrate_rk4: span must be nonnegative");
    const long steps = std::lround(span / dt);
    require(std::abs(steps * dt - span) <= 1e-9 * std::max(1.0, span),
            "integrate_rk4: span must be a multiple of dt");
    Modes u = u0;
    if (record) {
        record->times.push_back(0.0);
        record->states.push_back(u);
    }
    for (long s = 0; s < steps; ++s) {
        const Modes k1 = rhs(u, p);
        const Modes k2 = rhs(u + 0.5 * dt * k1, p);
        const Modes k3 = rhs(u + 0.5 * dt * k2, p);
        const Modes k4 = rhs(u + dt * k3, p);
        u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (u.cwiseAbs().maxCoeff() > 1e6) {
            throw std::runtime_error("integrate_rk4: blow-up at step " + std::to_string(s));
        }
        if (record && record_every > 0 && (s + 1) % record_every == 0) {
            record->times.push_back((s + 1) * dt);
            record->states.push_back(u);
        }
    }
    return u;
}

// Random initial state with power-law mode decay: u_k = A k^-gamma (g1 + i g2)/sqrt(2)
// for k >= 1 and a real N(0, A^2) zero mode.
inline Modes sample_initial_condition(RngStream& rng, int modes, double decay = 1.5,
                                      double amplitude = 1.0) {
    require(decay > 0.5, "sample_initial_condition: decay must exceed 1/2");
    Modes u(modes);
    u[0] = Complex(amplitude * rng.normal(), 0.0);
    for (int k = 1; k < modes; ++k) {
        const double scale = amplitude * std::pow(static_cast<double>(k), -decay) / std::sqrt(2.0);
        u[k] = Complex(scale * rng.normal(), scale * rng.normal());
    }
    return u;
}

// ---------------------------------------------------------------------------
// real parametrization for the samplers
// ---------------------------------------------------------------------------
//
// y in R^{2K-1} with y_0 = sqrt(L) Re u_0 and, for k >= 1,
// y_{2k-1} = sqrt(2L) Re u_k, y_{2k} = sqrt(2L) Im u_k. The scaling makes
// the energy exactly 1/2 ||y||^2 (the prescribed-energy set is a plain
// sphere) and the prescribed-mass set the coordinate plane
// y_0 = M / sqrt(L). The imaginary part of u_0 never enters the dynamics or
// the field and is not part of the state.

inline int real_dim(int modes) { return 2 * modes - 1; }

inline Vec modes_to_real(const Modes& u) {
    const Eigen::Index K = u.size();
    Vec y(2 * K - 1);
    const double root_l = std::sqrt(kDomainLength);
    const double root_2l = std::sqrt(2.0 * kDomainLength);
    y[0] = root_l * u[0].real();
    for (Eigen::Index k = 1; k < K; ++k) {
        y[2 * k - 1] = root_2l * u[k].real();
        y[2 * k] = root_2l * u[k].imag();
    }
    return y;
}

inline Modes real_to_modes(const Vec& y) {
    require(y.size() % 2 == 1, "real_to_modes: dimension must be 2K-1");
    const Eigen::Index K = (y.size() + 1) / 2;
    Modes u(K);
    const double root_l = std::sqrt(kDomainLength);
    const double root_2l = std::sqrt(2.0 * kDomainLength);
    u[0] = Complex(y[0] / root_l, 0.0);
    for (Eigen::Index k = 1; k < K; ++k) {
        u[k] = Complex(y[2 * k - 1] / root_2l, y[2 * k] / root_2l);
    }
    return u;
}

inline double mass_real(const Vec& y) { return std::sqrt(kDomainLength) * y[0]; }
inline double energy_real(const Vec& y) { return 0.5 * y.squaredNorm(); }

// row of the linear observation operator: u(x_loc) as a functional of y
inline Vec observation_row(int modes, double x_loc) {
    Vec row(real_dim(modes));
    const double root_l = std::sqrt(kDomainLength);
    const double root_2l = std::sqrt(2.0 * kDomainLength);
    row[0] = 1.0 / root_l;
    for (int k = 1; k < modes; ++k) {
        const double kk = static_cast<double>(k);
        row[2 * k - 1] = 2.0 * std::cos(kk * x_loc) / root_2l;
        row[2 * k] = -2.0 * std::sin(kk * x_loc) / root_2l;
    }
    return row;
}

}  // namespace sal::burgers
