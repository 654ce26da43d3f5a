#pragma once

// Projection onto intersections: Dykstra's algorithm (exact for convex
// sets) and plain alternating projections (POCS; the best-effort fallback
// when a member set is non-convex).

#include "sal/common.hpp"
#include "sal/constraints/constraint_set.hpp"

#include <atomic>
#include <vector>

namespace sal {

struct ProjectionResult {
    Vec point;
    bool converged = false;
    int cycles = 0;
};

namespace detail {

inline void check_compose_args(const std::vector<ConstraintPtr>& sets, const Vec& x) {
    // a single set is a degenerate composition equal to its own projection
    require(!sets.empty(), "composition needs at least one set");
    for (const auto& s : sets) {
        require(static_cast<bool>(s), "composition: null set");
        check_dim(x, s->dim(), "composition");
    }
}

// Convergence means more than a small displacement: disjoint sets reach a
// stationary limit cycle, so the returned point must also be feasible for
// every member before the flag is raised.
inline bool composition_feasible(const std::vector<ConstraintPtr>& sets, const Vec& x,
                                 double tol) {
    for (const auto& s : sets) {
        if (s->violation(x) > 10.0 * tol) return false;
    }
    return true;
}

}  // namespace detail

// Dykstra iteration with one correction term per set. The iterate
// displacement over a cycle can stall several cycles before the correction
// terms settle, so the stopping rule requires both the cycle displacement
// and the correction-term change to drop below tol in the max norm.
// Requires convex sets unless allow_nonconvex is set, in which case the
// result is best-effort.
inline ProjectionResult dykstra(const std::vector<ConstraintPtr>& sets, const Vec& x0,
                                int max_iters = 500, double tol = 1e-9,
                                bool allow_nonconvex = false) {
    detail::check_compose_args(sets, x0);
    if (!allow_nonconvex) {
        for (const auto& s : sets) {
            require(s->convex(), "dykstra: non-convex set " + s->name() +
                                     " (pass allow_nonconvex to override)");
        }
    }
    Vec x = x0;
    std::vector<Vec> corrections(sets.size(), Vec::Zero(x0.size()));
    ProjectionResult out;
    for (int it = 0; it < max_iters; ++it) {
        const Vec x_prev = x;
        double correction_change = 0.0;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            const Vec y = x + corrections[i];
            x = sets[i]->project(y);
            const Vec updated = y - x;
            correction_change =
                std::max(correction_change, (updated - corrections[i]).lpNorm<Eigen::Infinity>());
            corrections[i] = updated;
        }
        out.cycles = it + 1;
        if ((x - x_prev).lpNorm<Eigen::Infinity>() <= tol && correction_change <= tol) {
            out.converged = detail::composition_feasible(sets, x, tol);
            break;
        }
    }
    out.point = std::move(x);
    return out;
}

// Alternating projections (no correction terms). Converges for affine
// families and is the documented composition for non-convex members.
inline ProjectionResult alternating_projections(const std::vector<ConstraintPtr>& sets,
                                                const Vec& x0, int max_iters = 500,
                                                double tol = 1e-9) {
    detail::check_compose_args(sets, x0);
    Vec x = x0;
    ProjectionResult out;
    for (int it = 0; it < max_iters; ++it) {
        const Vec x_prev = x;
        for (const auto& s : sets) x = s->project(x);
        out.cycles = it + 1;
        if ((x - x_prev).lpNorm<Eigen::Infinity>() <= tol) {
            out.converged = detail::composition_feasible(sets, x, tol);
            break;
        }
    }
    out.point = std::move(x);
    return out;
}

// Intersection of constraint sets exposed through the ConstraintSet
// interface, so samplers can treat a composed feasible region like any
// other set. Projection runs Dykstra when every member is convex and
// alternating projections otherwise. Non-converged projections are counted
// rather than thrown: samplers log the count so lapses of the projection
// guarantee are visible in reports.
class IntersectionSet final : public ConstraintSet {
public:
    IntersectionSet(std::vector<ConstraintPtr> sets, int max_iters = 500, double tol = 1e-9)
        : ConstraintSet(sets.at(0)->dim(), all_convex(sets), "intersection"),
          sets_(std::move(sets)),
          max_iters_(max_iters),
          tol_(tol) {
        for (const auto& s : sets_) {
            require(s->dim() == dim(), "IntersectionSet: member dimension mismatch");
        }
    }

    Vec project(const Vec& x) const override {
        ProjectionResult r = convex()
                                 ? dykstra(sets_, x, max_iters_, tol_)
                                 : alternating_projections(sets_, x, max_iters_, tol_);
        if (!r.converged) ++nonconverged_;
        return std::move(r.point);
    }

    // Feasibility of the intersection is the worst member violation.
    double violation(const Vec& x) const override {
        double worst = 0.0;
        for (const auto& s : sets_) worst = std::max(worst, s->violation(x));
        return worst;
    }

    long nonconverged_count() const { return nonconverged_.load(); }
    const std::vector<ConstraintPtr>& members() const { return sets_; }

private:
    static bool all_convex(const std::vector<ConstraintPtr>& sets) {
        require(!sets.empty(), "IntersectionSet: empty member list");
        for (const auto& s : sets) {
            if (!s->convex()) return false;
        }
        return true;
    }

    std::vector<ConstraintPtr> sets_;
    int max_iters_;
    double tol_;
    mutable std::atomic<long> nonconverged_{0};
};

}  // namespace sal
