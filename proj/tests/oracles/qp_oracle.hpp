#pragma once

// Test-side oracles for projection problems, kept independent of the
// library's projection code paths.
//
//  * enumerate_projection: exact nearest point subject to linear equalities
//    and inequalities, by enumerating active subsets of the inequalities.
//    The optimum satisfies the KKT system of one active set, so it appears
//    among the candidates; the feasible candidate of minimal distance is the
//    projection.
//  * qr_affine_projection: projection onto {Ax = c} assembled from a QR
//    null-space basis instead of the normal-equations formula.
//  * box_equality_projection: primal active-set solver for
//    min ||x - x0||^2 s.t. Ax = c, lo <= x <= hi, started from a feasible
//    point.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct LinearSystem {
    Mat eq_a;   // may have zero rows
    Vec eq_b;
    Mat ineq_a;  // rows a_i with a_i^T x <= b_i
    Vec ineq_b;
};

// Nearest point to x0 satisfying the stacked equalities (rows of C, d).
inline Vec equality_projection(const Vec& x0, const Mat& C, const Vec& d) {
    if (C.rows() == 0) return x0;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(C * C.transpose());
    return x0 - C.transpose() * cod.solve(C * x0 - d);
}

inline bool feasible(const LinearSystem& sys, const Vec& x, double tol = 1e-8) {
    if (sys.eq_a.rows() > 0 && (sys.eq_a * x - sys.eq_b).lpNorm<Eigen::Infinity>() > tol) {
        return false;
    }
    for (Eigen::Index i = 0; i < sys.ineq_a.rows(); ++i) {
        if (sys.ineq_a.row(i).dot(x) > sys.ineq_b[i] + tol) return false;
    }
    return true;
}

inline Vec enumerate_projection(const LinearSystem& sys, const Vec& x0) {
    const Eigen::Index k = sys.ineq_a.rows();
    if (k > 20) throw std::runtime_error("enumerate_projection: too many inequalities");
    double best_dist = std::numeric_limits<double>::infinity();
    std::optional<Vec> best;
    for (std::uint64_t mask = 0; mask < (1ull << k); ++mask) {
        int active = 0;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (mask & (1ull << i)) ++active;
        }
        Mat C(sys.eq_a.rows() + active, x0.size());
        Vec d(C.rows());
        C.topRows(sys.eq_a.rows()) = sys.eq_a;
        d.head(sys.eq_a.rows()) = sys.eq_b;
        Eigen::Index r = sys.eq_a.rows();
        for (Eigen::Index i = 0; i < k; ++i) {
            if (mask & (1ull << i)) {
                C.row(r) = sys.ineq_a.row(i);
                d[r] = sys.ineq_b[i];
                ++r;
            }
        }
        const Vec cand = equality_projection(x0, C, d);
        if (!feasible(sys, cand)) continue;
        const double dist = (cand - x0).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best = cand;
        }
    }
    if (!best) throw std::runtime_error("enumerate_projection: no feasible candidate");
    return *best;
}

// Projection onto {Ax = c} via a QR factorization of A^T: particular
// solution plus the null-space component of x.
inline Vec qr_affine_projection(const Vec& x, const Mat& A, const Vec& c) {
    const Eigen::Index m = A.rows(), d = A.cols();
    Eigen::HouseholderQR<Mat> qr(A.transpose());
    const Mat Q = qr.householderQ() * Mat::Identity(d, d);
    const Mat Q_range = Q.leftCols(m);   // range of A^T
    const Mat Q_null = Q.rightCols(d - m);
    const Mat R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    // particular solution: A x_p = c with x_p in range(A^T)
    const Mat Rt = R.transpose();
    const Vec y = Rt.triangularView<Eigen::Lower>().solve(c);
    return Q_range * y + Q_null * (Q_null.transpose() * x);
}

inline Mat qr_null_basis(const Mat& A) {
    const Eigen::Index m = A.rows(), d = A.cols();
    Eigen::HouseholderQR<Mat> qr(A.transpose());
    const Mat Q = qr.householderQ() * Mat::Identity(d, d);
    return Q.rightCols(d - m);
}

// Primal active-set method for min ||x - x0||^2 s.t. Ax = c, lo <= x <= hi,
// starting from a feasible point. Strictly convex objective, so the method
// terminates at the unique optimum.
inline Vec box_equality_projection(const Vec& x0, const Mat& A, const Vec& c, const Vec& lo,
                                   const Vec& hi, const Vec& feasible_start,
                                   int max_iters = 2000) {
    const Eigen::Index d = x0.size();
    Vec x = feasible_start;
    std::vector<int> bound(d, 0);  // -1 at lower, +1 at upper, 0 free
    const double tol = 1e-11;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (x[i] <= lo[i] + tol) bound[i] = -1;
        if (x[i] >= hi[i] - tol) bound[i] = +1;
    }
    for (int iter = 0; iter < max_iters; ++iter) {
        // Solve the equality problem on the current working set.
        int fixed = 0;
        for (Eigen::Index i = 0; i < d; ++i) {
            if (bound[i] != 0) ++fixed;
        }
        Mat C(A.rows() + fixed, d);
        Vec rhs(C.rows());
        C.topRows(A.rows()) = A;
        rhs.head(A.rows()) = c;
        Eigen::Index r = A.rows();
        for (Eigen::Index i = 0; i < d; ++i) {
            if (bound[i] != 0) {
                C.row(r).setZero();
                C(r, i) = 1.0;
                rhs[r] = bound[i] < 0 ? lo[i] : hi[i];
                ++r;
            }
        }
        const Vec target = equality_projection(x0, C, rhs);
        const Vec step = target - x;

        if (step.lpNorm<Eigen::Infinity>() > 1e-12) {
            // Ratio test against the inactive bounds.
            double alpha = 1.0;
            Eigen::Index blocking = -1;
            int blocking_side = 0;
            for (Eigen::Index i = 0; i < d; ++i) {
                if (bound[i] != 0) continue;
                if (step[i] > 1e-14) {
                    const double a = (hi[i] - x[i]) / step[i];
                    if (a < alpha) {
                        alpha = a;
                        blocking = i;
                        blocking_side = +1;
                    }
                } else if (step[i] < -1e-14) {
                    const double a = (lo[i] - x[i]) / step[i];
                    if (a < alpha) {
                        alpha = a;
                        blocking = i;
                        blocking_side = -1;
                    }
                }
            }
            x += alpha * step;
            if (blocking >= 0 && alpha < 1.0) {
                bound[blocking] = blocking_side;
                x[blocking] = blocking_side < 0 ? lo[blocking] : hi[blocking];
                continue;
            }
        }

        // At the working-set optimum: check bound multipliers. With nu
        // solving A_free^T nu = (x - x0)_free, the quantity
        // (x - x0) - A^T nu on a fixed coordinate equals mu_lower - mu_upper
        // for that bound, so its sign decides whether the bound may leave
        // the working set.
        Mat free_cols(A.rows(), d - fixed);
        std::vector<Eigen::Index> free_idx;
        for (Eigen::Index i = 0; i < d; ++i) {
            if (bound[i] == 0) free_idx.push_back(i);
        }
        for (std::size_t j = 0; j < free_idx.size(); ++j) free_cols.col(j) = A.col(free_idx[j]);
        const Vec g = x - x0;
        Vec g_free(free_idx.size());
        for (std::size_t j = 0; j < free_idx.size(); ++j) g_free[j] = g[free_idx[j]];
        // least squares: free part of gradient must lie in range of A_free^T
        const Vec nu = free_cols.transpose()
                           .colPivHouseholderQr()
                           .solve(g_free);
        const Vec mult = g - A.transpose() * nu;

        Eigen::Index worst = -1;
        double worst_val = -1e-9;
        for (Eigen::Index i = 0; i < d; ++i) {
            if (bound[i] == 0) continue;
            // at upper bound the multiplier must be <= 0, at lower >= 0
            const double v = bound[i] > 0 ? mult[i] : -mult[i];
            if (v > worst_val) {
                worst_val = v;
                worst = i;
            }
        }
        if (worst < 0) return x;  // KKT satisfied
        bound[worst] = 0;
    }
    throw std::runtime_error("box_equality_projection: active-set iteration limit");
}

}  // namespace oracle
