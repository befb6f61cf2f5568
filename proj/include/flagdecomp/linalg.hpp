#ifndef FLAGDECOMP_LINALG_HPP
#define FLAGDECOMP_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <string>

#include "flagdecomp/errors.hpp"

namespace flagdecomp {

using Index = Eigen::Index;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Mat<double>;
using VectorXd = Vec<double>;

// Shared numerical tolerances. Tests and the decomposition engine read the same values.
namespace tol {
/// ‖XᵀX − I‖_F bound for accepting a matrix as Stiefel coordinates.
inline constexpr double kOrthonormality = 1e-8;
/// Relative reconstruction bound promised by svd().
inline constexpr double kSvdResidual = 1e-10;
/// Lower clamp on IRLS residual norms before taking w = r^{-1/2}.
inline constexpr double kWeightFloor = 1e-8;
/// A deflated block direction counts only if its singular value exceeds this
/// fraction of the undeflated block's largest singular value.
inline constexpr double kDeflationRank = 1e-10;
}  // namespace tol

/// Thin SVD, A = U·diag(σ)·Vᵀ with r = min(rows, cols).
template <typename Scalar>
struct SvdResult {
    Mat<Scalar> left_vectors;
    Vec<Scalar> singular_values;  // nonincreasing, ≥ 0
    Mat<Scalar> right_vectors;
};

template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    if (a.rows() == 0 || a.cols() == 0) {
        throw InvalidArgument("svd: empty matrix");
    }
    if (!a.allFinite()) {
        throw InvalidArgument("svd: matrix has non-finite entries");
    }
    const Mat<Scalar> dense = a;
    Eigen::JacobiSVD<Mat<Scalar>> solver(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("svd: Jacobi iteration did not converge");
    }
    SvdResult<Scalar> out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    if (!out.left_vectors.allFinite() || !out.singular_values.allFinite() ||
        !out.right_vectors.allFinite()) {
        throw NumericalFailure("svd: non-finite factors");
    }
    return out;
}

/// Number of singular values above max(rows, cols)·eps·σ_max. Zero for the zero matrix.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& singular_values, Index rows, Index cols) {
    using Scalar = typename Derived::Scalar;
    if (singular_values.size() == 0) {
        return 0;
    }
    const Scalar largest = singular_values.maxCoeff();
    if (!(largest > Scalar(0))) {
        return 0;
    }
    const Scalar threshold = Scalar(std::max(rows, cols)) *
                             std::numeric_limits<Scalar>::epsilon() * largest;
    return static_cast<Index>((singular_values.array() > threshold).count());
}

template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& a) {
    const auto s = svd(a);
    return numerical_rank(s.singular_values, a.rows(), a.cols());
}

/// ‖QᵀQ − I‖_F.
template <typename Derived>
typename Derived::Scalar orthonormality_error(const Eigen::MatrixBase<Derived>& q) {
    using Scalar = typename Derived::Scalar;
    return (q.transpose() * q - Mat<Scalar>::Identity(q.cols(), q.cols())).norm();
}

template <typename Derived>
bool is_orthonormal(const Eigen::MatrixBase<Derived>& q, double tolerance = tol::kOrthonormality) {
    return q.cols() <= q.rows() && orthonormality_error(q) <= tolerance;
}

/// Orthogonal projector QQᵀ onto the column span of an orthonormal Q.
template <typename Derived>
Mat<typename Derived::Scalar> projector(const Eigen::MatrixBase<Derived>& q) {
    return q * q.transpose();
}

/// Π_{Q⊥} = I − QQᵀ. Q must have orthonormal columns.
template <typename Derived>
Mat<typename Derived::Scalar> projector_complement(const Eigen::MatrixBase<Derived>& q) {
    using Scalar = typename Derived::Scalar;
    if (!is_orthonormal(q)) {
        throw InvalidArgument("projector_complement: columns are not orthonormal");
    }
    Mat<Scalar> pi = Mat<Scalar>::Identity(q.rows(), q.rows());
    pi.noalias() -= q * q.transpose();
    return pi;
}

/// Orthonormal basis for the column span of a (returns the leading left singular vectors).
template <typename Derived>
Mat<typename Derived::Scalar> orthonormal_basis(const Eigen::MatrixBase<Derived>& a) {
    const auto s = svd(a);
    const Index r = numerical_rank(s.singular_values, a.rows(), a.cols());
    return s.left_vectors.leftCols(r);
}

}  // namespace flagdecomp

#endif
