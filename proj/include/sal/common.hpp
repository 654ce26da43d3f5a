#pragma once

// Shared aliases and small utilities used across the library.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace sal {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Absolute tolerance on constraint violation below which a point counts as
// feasible. Equality constraint sets have measure zero; exact projections
// land within floating-point rounding of the set.
inline constexpr double kProjTol = 1e-10;

// Hard guard against diverging chains.
inline constexpr double kDivergenceGuard = 1e8;

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline bool all_finite(const Vec& v) {
    return v.allFinite();
}

inline void ensure_finite(const Vec& v, const std::string& context) {
    if (!v.allFinite()) {
        throw std::runtime_error("non-finite value in " + context);
    }
}

inline void check_dim(const Vec& v, Eigen::Index d, const std::string& context) {
    if (v.size() != d) {
        throw std::invalid_argument(context + ": dimension mismatch (got " +
                                    std::to_string(v.size()) + ", expected " +
                                    std::to_string(d) + ")");
    }
}

}  // namespace sal
