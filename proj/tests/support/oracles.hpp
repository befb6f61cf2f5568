#ifndef FLAGDECOMP_TESTS_ORACLES_HPP
#define FLAGDECOMP_TESTS_ORACLES_HPP

// Reference computations used to check library results. They deliberately avoid the
// library's own SVD and distance code paths.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Index = Eigen::Index;

inline MatrixXd gaussian(Index rows, Index cols, std::uint64_t seed, double stddev = 1.0) {
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> n(0.0, stddev);
    MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = n(gen);
    return m;
}

/// Orthonormal columns via Householder QR of a Gaussian matrix.
inline MatrixXd stiefel(Index n, Index k, std::uint64_t seed) {
    const MatrixXd g = gaussian(n, k, seed);
    Eigen::HouseholderQR<MatrixXd> qr(g);
    return qr.householderQ() * MatrixXd::Identity(n, k);
}

/// Orthogonal projector onto the column span of A, Π = A·A⁺ with a complete orthogonal
/// decomposition for the pseudo-inverse.
inline MatrixXd span_projector(const MatrixXd& a, double threshold = 1e-10) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
    cod.setThreshold(threshold);
    cod.compute(a);
    return a * cod.pseudoInverse();
}

inline MatrixXd projector(const MatrixXd& q) { return q * q.transpose(); }

/// sqrt(½ Σᵢ ‖XᵢXᵢᵀ − YᵢYᵢᵀ‖_F²), blocks given by column widths.
inline double flag_chordal_projector(const MatrixXd& x, const MatrixXd& y,
                                     const std::vector<Index>& widths) {
    double total = 0.0;
    Index off = 0;
    for (const Index w : widths) {
        const MatrixXd px = projector(x.middleCols(off, w));
        const MatrixXd py = projector(y.middleCols(off, w));
        total += 0.5 * (px - py).squaredNorm();
        off += w;
    }
    return std::sqrt(total);
}

/// sqrt(Σᵢ mᵢ − tr(XᵢᵀYᵢYᵢᵀXᵢ)).
inline double flag_chordal_trace(const MatrixXd& x, const MatrixXd& y,
                                 const std::vector<Index>& widths) {
    double total = 0.0;
    Index off = 0;
    for (const Index w : widths) {
        const MatrixXd xi = x.middleCols(off, w);
        const MatrixXd yi = y.middleCols(off, w);
        total += static_cast<double>(w) - (xi.transpose() * yi * yi.transpose() * xi).trace();
        off += w;
    }
    return std::sqrt(std::max(total, 0.0));
}

/// Block-diagonal orthogonal matrix with blocks of the given widths.
inline MatrixXd block_rotation(const std::vector<Index>& widths, std::uint64_t seed) {
    Index total = 0;
    for (const Index w : widths) total += w;
    MatrixXd m = MatrixXd::Zero(total, total);
    Index off = 0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        m.block(off, off, widths[i], widths[i]) = stiefel(widths[i], widths[i], seed + 31 * i);
        off += widths[i];
    }
    return m;
}

/// Exact-regime data: columns of block i are combinations of the first signature[i]
/// columns of x.
inline MatrixXd nested_data(const MatrixXd& x, const std::vector<Index>& signature,
                            const std::vector<Index>& block_sizes, std::uint64_t seed) {
    Index p = 0;
    for (const Index b : block_sizes) p += b;
    MatrixXd d(x.rows(), p);
    Index col = 0;
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        d.middleCols(col, block_sizes[i]) =
            x.leftCols(signature[i]) * gaussian(signature[i], block_sizes[i], seed + 7 * i);
        col += block_sizes[i];
    }
    return d;
}

/// Rank from the eigenvalues of AᵀA; square-rooting limits the usable threshold to ~√ε.
inline Index rank(const MatrixXd& a, double rel = 1e-6) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a.transpose() * a);
    const VectorXd ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const double top = ev.maxCoeff();
    Index r = 0;
    for (Index i = 0; i < ev.size(); ++i) r += ev(i) > rel * top ? 1 : 0;
    return top > 0.0 ? r : 0;
}

}  // namespace oracle

#endif
