#pragma once

// Central finite-difference check of a ScoreField's gradient against its
// potential. Every built-in field is required to pass this at tolerance 1e-4
// with step 1e-5.

#include "sal/common.hpp"
#include "sal/core/score_field.hpp"

#include <vector>

namespace sal {

inline Vec finite_difference_gradient(const std::function<double(const Vec&)>& f,
                                      const Vec& x, double step) {
    require(step > 0.0, "finite_difference_gradient: step must be positive");
    Vec g(x.size());
    Vec xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + step;
        xm[i] = x[i] - step;
        g[i] = (f(xp) - f(xm)) / (2.0 * step);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

// Max over points of ||grad(x) - FD(x)|| / (1 + ||FD(x)||).
inline double finite_difference_check(const ScoreField& field,
                                      const std::vector<Vec>& points, double step) {
    require(field.has_potential(), "finite_difference_check: field has no potential");
    require(step > 0.0, "finite_difference_check: step must be positive");
    double worst = 0.0;
    for (const Vec& x : points) {
        const Vec fd = finite_difference_gradient(field.potential, x, step);
        const Vec g = field.grad_at(x);
        const double err = (g - fd).norm() / (1.0 + fd.norm());
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace sal
