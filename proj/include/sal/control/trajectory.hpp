#pragma once

// Trajectory feasibility problem: stacked state x = (y, u) in R^{2S} with
// second-order linear dynamics discretized by central differences,
//
//   y_0 = 0,  y_1 = y_0  (rest start),
//   (y_{i+1} - 2 y_i + y_{i-1}) / ds^2 = a y_i + b u_i,   i = 1..S-2,
//
// a box |u| <= u_max on the controls, and non-convex obstacle constraints
// y(s_i) outside a forbidden segment. The stencil lives in this builder
// only, so alternative discretizations drop in without touching callers.

#include "sal/common.hpp"
#include "sal/constraints/affine.hpp"
#include "sal/constraints/compose.hpp"
#include "sal/constraints/sets.hpp"
#include "sal/core/rng.hpp"

#include <memory>
#include <vector>

namespace sal::control {

struct DynamicsParams {
    int steps = 200;        // S
    double ds = 0.01;
    double restoring = -10.0;  // a
    double gain = 1.0;         // b
    double u_max = 10.0;

    int dim() const { return 2 * steps; }
};

// y recursion used both by the dataset generator and (through the affine
// rows below) the constraint set, so generated trajectories satisfy the
// equality system to rounding.
inline Vec simulate_states(const DynamicsParams& p, const Vec& controls) {
    require(controls.size() == p.steps, "simulate_states: control size mismatch");
    Vec y = Vec::Zero(p.steps);
    const double ds2 = p.ds * p.ds;
    for (int i = 1; i + 1 < p.steps; ++i) {
        y[i + 1] = 2.0 * y[i] - y[i - 1] + ds2 * (p.restoring * y[i] + p.gain * controls[i]);
    }
    return y;
}

inline Eigen::SparseMatrix<double> dynamics_matrix(const DynamicsParams& p) {
    const int S = p.steps;
    const double ds2 = p.ds * p.ds;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(5 * S);
    // row 0: y_0 = 0 ; row 1: y_1 - y_0 = 0
    triplets.emplace_back(0, 0, 1.0);
    triplets.emplace_back(1, 1, 1.0);
    triplets.emplace_back(1, 0, -1.0);
    for (int i = 1; i + 1 < S; ++i) {
        const int row = i + 1;
        triplets.emplace_back(row, i + 1, 1.0);
        triplets.emplace_back(row, i, -2.0 - ds2 * p.restoring);
        triplets.emplace_back(row, i - 1, 1.0);
        triplets.emplace_back(row, S + i, -ds2 * p.gain);
    }
    Eigen::SparseMatrix<double> A(S, 2 * S);
    A.setFromTriplets(triplets.begin(), triplets.end());
    return A;
}

// Dynamics constraint set: Dykstra over the affine equality system and the
// control box. The returned point satisfies the box exactly (the box
// projection closes each cycle) and the equality residual to tolerance.
class DynamicsSet final : public ConstraintSet {
public:
    explicit DynamicsSet(const DynamicsParams& p, int max_iters = 200, double tol = 1e-10)
        : ConstraintSet(p.dim(), true, "dynamics"),
          params_(p),
          max_iters_(max_iters),
          tol_(tol) {
        affine_ = std::make_shared<SparseAffineConstraint>(dynamics_matrix(p),
                                                           Vec::Zero(p.steps));
        Vec lo = Vec::Constant(p.dim(), -1e300);
        Vec hi = Vec::Constant(p.dim(), 1e300);
        lo.tail(p.steps).setConstant(-p.u_max);
        hi.tail(p.steps).setConstant(p.u_max);
        box_ = std::make_shared<BoxConstraint>(lo, hi);
    }

    const DynamicsParams& params() const { return params_; }
    const SparseAffineConstraint& affine() const { return *affine_; }
    const BoxConstraint& box() const { return *box_; }

    ProjectionResult project_with_status(const Vec& x) const {
        return dykstra({affine_, box_}, x, max_iters_, tol_);
    }

    Vec project(const Vec& x) const override {
        ProjectionResult r = project_with_status(x);
        if (!r.converged) ++nonconverged_;
        return std::move(r.point);
    }

    double violation(const Vec& x) const override {
        return std::max(affine_->violation(x), box_->violation(x));
    }

    double equality_residual_inf(const Vec& x) const { return affine_->residual_inf(x); }
    long nonconverged_count() const { return nonconverged_.load(); }

private:
    DynamicsParams params_;
    std::shared_ptr<SparseAffineConstraint> affine_;
    std::shared_ptr<BoxConstraint> box_;
    int max_iters_;
    double tol_;
    mutable std::atomic<long> nonconverged_{0};
};

inline Vec project_dynamics(const Vec& x, const DynamicsSet& set) { return set.project(x); }

struct Obstacle {
    int time_index = 0;      // s_i as an index into the y block
    double lo = 0.0;
    double hi = 0.0;
};

// Complement of forbidden segments on y coordinates; obstacles act on
// disjoint coordinates, so the joint projection applies each in turn.
class ObstacleSet final : public ConstraintSet {
public:
    ObstacleSet(int dim, std::vector<Obstacle> obstacles)
        : ConstraintSet(dim, obstacles.empty(), "obstacles"), obstacles_(std::move(obstacles)) {
        for (const auto& o : obstacles_) {
            require(o.time_index >= 0 && o.time_index < dim / 2,
                    "ObstacleSet: obstacle index outside the state block");
            require(o.lo <= o.hi, "ObstacleSet: empty segment");
        }
    }

    const std::vector<Obstacle>& obstacles() const { return obstacles_; }

    Vec project(const Vec& x) const override {
        check_dim(x, dim(), "ObstacleSet::project");
        Vec out = x;
        for (const auto& o : obstacles_) {
            const double v = out[o.time_index];
            if (v > o.lo && v < o.hi) {
                out[o.time_index] = (v - o.lo <= o.hi - v) ? o.lo : o.hi;
            }
        }
        return out;
    }

    double violation(const Vec& x) const override {
        double worst = 0.0;
        for (const auto& o : obstacles_) {
            const double v = x[o.time_index];
            if (v > o.lo && v < o.hi) worst = std::max(worst, std::min(v - o.lo, o.hi - v));
        }
        return worst;
    }

private:
    std::vector<Obstacle> obstacles_;
};

}  // namespace sal::control
