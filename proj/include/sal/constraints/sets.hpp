#pragma once

// Closed-form constraint sets: energy sphere, mass hyperplane, box,
// halfspace, and the (non-convex) complement of a line obstacle.

#include "sal/common.hpp"
#include "sal/constraints/constraint_set.hpp"

#include <algorithm>
#include <cmath>

namespace sal {

// { x : 1/2 ||x||^2 = E }, the prescribed-energy shell. Non-convex.
// The projection at x = 0 is undefined mathematically; we fix the
// tie-break to r e_1 so the operator is total and deterministic.
class SphereConstraint final : public ConstraintSet {
public:
    SphereConstraint(int dim, double energy)
        : ConstraintSet(dim, false, "sphere"), radius_(std::sqrt(2.0 * energy)) {
        require(energy > 0.0, "SphereConstraint: energy must be positive");
    }

    double radius() const { return radius_; }

    Vec project(const Vec& x) const override {
        check_dim(x, dim(), "SphereConstraint::project");
        const double n = x.norm();
        if (n == 0.0) {
            Vec e = Vec::Zero(dim());
            e[0] = radius_;
            return e;
        }
        return (radius_ / n) * x;
    }

    double violation(const Vec& x) const override { return std::abs(x.norm() - radius_); }

private:
    double radius_;
};

inline Vec project_sphere(const Vec& x, double energy) {
    return SphereConstraint(static_cast<int>(x.size()), energy).project(x);
}

// { x : a^T x = c }. With a = 1 this is the prescribed-mass plane.
class HyperplaneConstraint final : public ConstraintSet {
public:
    HyperplaneConstraint(Vec a, double c)
        : ConstraintSet(static_cast<int>(a.size()), true, "hyperplane"),
          a_(std::move(a)),
          c_(c),
          a_sq_(a_.squaredNorm()) {
        require(a_sq_ > 0.0, "HyperplaneConstraint: normal must be nonzero");
    }

    static HyperplaneConstraint mass(int dim, double target) {
        return HyperplaneConstraint(Vec::Ones(dim), target);
    }

    Vec project(const Vec& x) const override {
        check_dim(x, dim(), "HyperplaneConstraint::project");
        return x + ((c_ - a_.dot(x)) / a_sq_) * a_;
    }

    double violation(const Vec& x) const override {
        return std::abs(a_.dot(x) - c_) / std::sqrt(a_sq_);
    }

private:
    Vec a_;
    double c_;
    double a_sq_;
};

inline Vec project_hyperplane_mass(const Vec& x, double mass) {
    return HyperplaneConstraint::mass(static_cast<int>(x.size()), mass).project(x);
}

// { x : a^T x <= b }.
class HalfspaceConstraint final : public ConstraintSet {
public:
    HalfspaceConstraint(Vec a, double b)
        : ConstraintSet(static_cast<int>(a.size()), true, "halfspace"),
          a_(std::move(a)),
          b_(b),
          a_sq_(a_.squaredNorm()) {
        require(a_sq_ > 0.0, "HalfspaceConstraint: normal must be nonzero");
    }

    Vec project(const Vec& x) const override {
        check_dim(x, dim(), "HalfspaceConstraint::project");
        const double excess = a_.dot(x) - b_;
        if (excess <= 0.0) return x;
        return x - (excess / a_sq_) * a_;
    }

    double violation(const Vec& x) const override {
        return std::max(0.0, a_.dot(x) - b_) / std::sqrt(a_sq_);
    }

private:
    Vec a_;
    double b_;
    double a_sq_;
};

// { x : lo <= x <= hi } elementwise.
class BoxConstraint final : public ConstraintSet {
public:
    BoxConstraint(Vec lo, Vec hi)
        : ConstraintSet(static_cast<int>(lo.size()), true, "box"),
          lo_(std::move(lo)),
          hi_(std::move(hi)) {
        require(lo_.size() == hi_.size(), "BoxConstraint: bound sizes differ");
        for (Eigen::Index i = 0; i < lo_.size(); ++i) {
            require(lo_[i] <= hi_[i], "BoxConstraint: lo > hi at coordinate " + std::to_string(i));
        }
    }

    static BoxConstraint symmetric(int dim, double bound) {
        return BoxConstraint(Vec::Constant(dim, -bound), Vec::Constant(dim, bound));
    }

    Vec project(const Vec& x) const override {
        check_dim(x, dim(), "BoxConstraint::project");
        return x.cwiseMax(lo_).cwiseMin(hi_);
    }

private:
    Vec lo_, hi_;
};

inline Vec project_box(const Vec& x, const Vec& lo, const Vec& hi) {
    return BoxConstraint(lo, hi).project(x);
}

// Complement of a forbidden segment on one coordinate:
// { x : x[i] not in (lo, hi) }. Non-convex. Points inside the segment move
// to the nearer endpoint; exact midpoints tie-break to the lower endpoint.
class ObstacleComplementConstraint final : public ConstraintSet {
public:
    ObstacleComplementConstraint(int dim, int coord, double seg_lo, double seg_hi)
        : ConstraintSet(dim, false, "obstacle-complement"),
          coord_(coord),
          lo_(seg_lo),
          hi_(seg_hi) {
        require(coord >= 0 && coord < dim, "ObstacleComplementConstraint: bad coordinate index");
        require(seg_lo <= seg_hi, "ObstacleComplementConstraint: empty segment");
    }

    Vec project(const Vec& x) const override {
        check_dim(x, dim(), "ObstacleComplementConstraint::project");
        const double v = x[coord_];
        if (v < lo_ || v > hi_) return x;
        Vec y = x;
        y[coord_] = (v - lo_ <= hi_ - v) ? lo_ : hi_;
        return y;
    }

    double violation(const Vec& x) const override {
        const double v = x[coord_];
        if (v < lo_ || v > hi_) return 0.0;
        return std::min(v - lo_, hi_ - v);
    }

private:
    int coord_;
    double lo_, hi_;
};

}  // namespace sal
