#pragma once

// Equality constraints h(x) = 0 for the dual-based samplers. Unlike the
// projection-based ConstraintSet, these carry the constraint function
// itself (and its Jacobian where the sampler needs gradients).

#include "sal/common.hpp"

#include <functional>

namespace sal {

struct EqualityConstraint {
    int dim = 0;  // state dimension d
    int m = 0;    // number of constraint components
    std::function<Vec(const Vec&)> h;
    std::function<Mat(const Vec&)> jacobian;  // m x d; required by gradient-based samplers

    Vec h_at(const Vec& x) const {
        check_dim(x, dim, "EqualityConstraint::h");
        Vec v = h(x);
        require(v.size() == m, "EqualityConstraint: h returned wrong size");
        return v;
    }

    Mat jacobian_at(const Vec& x) const {
        require(static_cast<bool>(jacobian), "EqualityConstraint: jacobian not supplied");
        check_dim(x, dim, "EqualityConstraint::jacobian");
        Mat J = jacobian(x);
        require(J.rows() == m && J.cols() == dim, "EqualityConstraint: jacobian shape mismatch");
        return J;
    }

    double violation(const Vec& x) const { return h_at(x).norm(); }
};

// h(x) = 1/2 ||x||^2 - E, the prescribed-energy equality.
inline EqualityConstraint energy_equality(int dim, double energy) {
    EqualityConstraint c;
    c.dim = dim;
    c.m = 1;
    c.h = [energy](const Vec& x) { return Vec::Constant(1, 0.5 * x.squaredNorm() - energy); };
    c.jacobian = [](const Vec& x) { return Mat(x.transpose()); };
    return c;
}

// h(x) = sum_i x_i - M, the prescribed-mass equality.
inline EqualityConstraint mass_equality(int dim, double mass) {
    EqualityConstraint c;
    c.dim = dim;
    c.m = 1;
    c.h = [mass](const Vec& x) { return Vec::Constant(1, x.sum() - mass); };
    c.jacobian = [dim](const Vec&) { return Mat(Vec::Ones(dim).transpose()); };
    return c;
}

// h(x) = a^T x - c.
inline EqualityConstraint linear_equality(Vec a, double c) {
    EqualityConstraint out;
    out.dim = static_cast<int>(a.size());
    out.m = 1;
    Vec a2 = a;
    out.h = [a, c](const Vec& x) { return Vec::Constant(1, a.dot(x) - c); };
    out.jacobian = [a2](const Vec&) { return Mat(a2.transpose()); };
    return out;
}

}  // namespace sal
