#pragma once

// Constraint sets with Euclidean projection. A set knows its dimension,
// whether it is convex, how to project, and how far a point is from it.
// Sets are immutable after construction and safe to share across chains.

#include "sal/common.hpp"

#include <memory>
#include <string>

namespace sal {

class ConstraintSet {
public:
    virtual ~ConstraintSet() = default;

    int dim() const { return dim_; }
    bool convex() const { return convex_; }
    const std::string& name() const { return name_; }

    virtual Vec project(const Vec& x) const = 0;

    // Euclidean distance to the set. Subclasses override when a cheaper
    // closed form exists; the default goes through project.
    virtual double violation(const Vec& x) const { return (x - project(x)).norm(); }

    bool is_member(const Vec& x, double tol = kProjTol) const { return violation(x) <= tol; }

protected:
    ConstraintSet(int dim, bool convex, std::string name)
        : dim_(dim), convex_(convex), name_(std::move(name)) {
        require(dim > 0, "ConstraintSet: dimension must be positive");
    }

private:
    int dim_;
    bool convex_;
    std::string name_;
};

using ConstraintPtr = std::shared_ptr<const ConstraintSet>;

// Whole space; projection is the identity. Lets samplers treat the
// unconstrained case uniformly.
class FreeSet final : public ConstraintSet {
public:
    explicit FreeSet(int dim) : ConstraintSet(dim, true, "free") {}
    Vec project(const Vec& x) const override { return x; }
    double violation(const Vec&) const override { return 0.0; }
};

}  // namespace sal
