#pragma once

// Projection onto { x : A x = c } for full-row-rank A, dense and sparse
// variants. The Gram factorization of A A^T is computed once per set and
// reused by every projection.

#include "sal/common.hpp"
#include "sal/constraints/constraint_set.hpp"

#include <Eigen/Sparse>

namespace sal {

class AffineConstraint final : public ConstraintSet {
public:
    AffineConstraint(Mat A, Vec c)
        : ConstraintSet(static_cast<int>(A.cols()), true, "affine"),
          A_(std::move(A)),
          c_(std::move(c)) {
        require(A_.rows() == c_.size(), "AffineConstraint: rows of A and size of c differ");
        require(A_.rows() <= A_.cols(), "AffineConstraint: need m <= d");

        // Rank check: pivots of a column-pivoted QR of A^T against
        // 1e-12 * ||A||.
        Eigen::ColPivHouseholderQR<Mat> qr(A_.transpose());
        const double scale = A_.norm();
        const Mat& R = qr.matrixR();
        for (Eigen::Index k = 0; k < A_.rows(); ++k) {
            if (std::abs(R(k, k)) < 1e-12 * scale) {
                throw std::invalid_argument("AffineConstraint: A is rank deficient");
            }
        }
        gram_llt_.compute(A_ * A_.transpose());
        require(gram_llt_.info() == Eigen::Success, "AffineConstraint: Gram factorization failed");
    }

    const Mat& matrix() const { return A_; }
    const Vec& rhs() const { return c_; }

    Vec project(const Vec& x) const override {
        check_dim(x, dim(), "AffineConstraint::project");
        return x - A_.transpose() * gram_llt_.solve(A_ * x - c_);
    }

    double residual_inf(const Vec& x) const { return (A_ * x - c_).lpNorm<Eigen::Infinity>(); }

private:
    Mat A_;
    Vec c_;
    Eigen::LLT<Mat> gram_llt_;
};

inline Vec project_affine(const Vec& x, const Mat& A, const Vec& c) {
    return AffineConstraint(A, c).project(x);
}

// Sparse variant for banded systems (the trajectory dynamics stencil has at
// most four nonzeros per row, so A A^T is banded and the Cholesky solve is
// linear in the number of rows).
class SparseAffineConstraint final : public ConstraintSet {
public:
    using SpMat = Eigen::SparseMatrix<double>;

    SparseAffineConstraint(SpMat A, Vec c)
        : ConstraintSet(static_cast<int>(A.cols()), true, "affine-sparse"),
          A_(std::move(A)),
          c_(std::move(c)) {
        require(A_.rows() == c_.size(), "SparseAffineConstraint: rows of A and size of c differ");
        require(A_.rows() <= A_.cols(), "SparseAffineConstraint: need m <= d");
        SpMat gram = (A_ * SpMat(A_.transpose())).pruned();
        ldlt_.compute(gram);
        require(ldlt_.info() == Eigen::Success, "SparseAffineConstraint: Gram factorization failed");
        const double scale2 = gram.coeffs().abs().maxCoeff();
        const double floor = 1e-24 * scale2;
        for (Eigen::Index i = 0; i < ldlt_.vectorD().size(); ++i) {
            if (!(ldlt_.vectorD()[i] > floor)) {
                throw std::invalid_argument("SparseAffineConstraint: A is rank deficient");
            }
        }
    }

    const SpMat& matrix() const { return A_; }
    const Vec& rhs() const { return c_; }

    Vec project(const Vec& x) const override {
        check_dim(x, dim(), "SparseAffineConstraint::project");
        return x - A_.transpose() * ldlt_.solve(A_ * x - c_);
    }

    double residual_inf(const Vec& x) const { return (A_ * x - c_).lpNorm<Eigen::Infinity>(); }

private:
    SpMat A_;
    Vec c_;
    Eigen::SimplicialLDLT<SpMat> ldlt_;
};

}  // namespace sal
