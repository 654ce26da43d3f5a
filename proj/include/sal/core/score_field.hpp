#pragma once

// Potential/score pair driving the Langevin samplers. The samplers only ever
// need grad; potential is optional and enables finite-difference validation
// and quadrature checks.

#include "sal/common.hpp"

#include <functional>
#include <utility>

namespace sal {

struct ScoreField {
    int dim = 0;
    std::function<double(const Vec&)> potential;  // f(x), may be empty
    std::function<Vec(const Vec&)> grad;          // gradient of f (the negated score)

    Vec grad_at(const Vec& x) const {
        check_dim(x, dim, "ScoreField::grad");
        Vec g = grad(x);
        ensure_finite(g, "ScoreField gradient");
        return g;
    }

    double potential_at(const Vec& x) const {
        require(static_cast<bool>(potential), "ScoreField: potential not supplied");
        check_dim(x, dim, "ScoreField::potential");
        return potential(x);
    }

    bool has_potential() const { return static_cast<bool>(potential); }
};

// Time-indexed variant for schedule-driven (diffusion-style) sampling:
// grad(x, t) is the potential gradient at step t with per-step size tau(t),
// t = 0..steps-1. Works as the plug-in surface for externally supplied
// score models.
struct TimeScoreField {
    int dim = 0;
    int steps = 0;
    std::function<Vec(const Vec&, int)> grad;
    std::function<double(int)> tau;

    Vec grad_at(const Vec& x, int t) const {
        check_dim(x, dim, "TimeScoreField::grad");
        require(t >= 0 && t < steps, "TimeScoreField: step index out of range");
        Vec g = grad(x, t);
        ensure_finite(g, "TimeScoreField gradient");
        return g;
    }

    double tau_at(int t) const {
        require(t >= 0 && t < steps, "TimeScoreField: step index out of range");
        double v = tau(t);
        require(v > 0.0, "TimeScoreField: tau must be positive");
        return v;
    }
};

// Wraps a static field into the time-indexed interface with constant tau.
inline TimeScoreField constant_schedule(const ScoreField& field, double tau, int steps) {
    require(tau > 0.0, "constant_schedule: tau must be positive");
    TimeScoreField out;
    out.dim = field.dim;
    out.steps = steps;
    out.grad = [field](const Vec& x, int) { return field.grad(x); };
    out.tau = [tau](int) { return tau; };
    return out;
}

}  // namespace sal
