#pragma once

// Two-set feasibility ADMM over the dynamics set and the obstacle-free set,
// in the scaled form
//
//   v   <- P_{C_o}(x + mu)
//   x   <- P_{C_d}(v - mu)
//   mu  <- mu + x - v
//
// Non-convergence is an outcome, not an error: the experiment harness
// records success fractions.

#include "sal/common.hpp"
#include "sal/control/trajectory.hpp"

#include <vector>

namespace sal::control {

struct AdmmResult {
    Vec point;
    bool success = false;
    int iterations = 0;
    std::vector<double> residual_trace;  // ||x - v|| per iteration
    double dynamics_violation = 0.0;
    double obstacle_violation = 0.0;
};

inline AdmmResult admm_feasibility(const Vec& x0, const DynamicsSet& dynamics,
                                   const ObstacleSet& obstacles, int iters = 500,
                                   double tol = 1e-6) {
    require(iters >= 1, "admm_feasibility: iters must be >= 1");
    check_dim(x0, dynamics.dim(), "admm_feasibility");
    Vec x = x0;
    Vec mu = Vec::Zero(x.size());
    AdmmResult out;
    out.residual_trace.reserve(iters);
    for (int it = 0; it < iters; ++it) {
        const Vec v = obstacles.project(x + mu);
        x = dynamics.project(v - mu);
        mu += x - v;
        out.iterations = it + 1;
        out.residual_trace.push_back((x - v).norm());

        out.dynamics_violation = dynamics.violation(x);
        out.obstacle_violation = obstacles.violation(x);
        if (std::max(out.dynamics_violation, out.obstacle_violation) <= tol) {
            out.success = true;
            break;
        }
    }
    out.point = std::move(x);
    return out;
}

}  // namespace sal::control
