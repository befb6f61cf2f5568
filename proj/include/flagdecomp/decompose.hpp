#ifndef FLAGDECOMP_DECOMPOSE_HPP
#define FLAGDECOMP_DECOMPOSE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flagdecomp/flagspace.hpp"
#include "flagdecomp/hierarchy.hpp"
#include "flagdecomp/linalg.hpp"

namespace flagdecomp {

enum class SolverMode {
    svd,       // least squares, q = 2
    irls_svd,  // sum of column residual norms, q = 1
};

std::string to_string(SolverMode mode);
SolverMode parse_solver_mode(const std::string& text);

struct SolverConfig {
    SolverMode mode = SolverMode::svd;
    int max_iterations = 100;
    double relative_tolerance = 1e-8;
    double weight_floor = tol::kWeightFloor;
    /// Run validate_hierarchy() on the input before decomposing. Off by default:
    /// noisy data routinely violates exact ranks while the flag type stays meaningful.
    bool check_hierarchy = false;

    void validate() const;
};

/// Output of get_basis with solver diagnostics.
template <typename Scalar>
struct BasisResult {
    Mat<Scalar> basis;
    /// Singular values of the input block (before any reweighting).
    Vec<Scalar> singular_values;
    /// Reweighted SVDs performed (0 in SVD mode).
    int iterations = 0;
    /// Objective of the returned basis: Σ‖rⱼ‖² in SVD mode, Σ‖rⱼ‖ in IRLS mode.
    Scalar objective = 0;
    /// IRLS objective of the SVD warm start.
    Scalar initial_objective = 0;
    /// More directions requested than the block's numerical rank; the extra
    /// columns come from the remaining singular vectors.
    bool padded = false;
};

namespace detail {

template <typename Scalar, typename DerivedC>
Vec<Scalar> residual_norms(const Mat<Scalar>& q, const Eigen::MatrixBase<DerivedC>& c) {
    const Mat<Scalar> coeffs = q.transpose() * c;
    const Mat<Scalar> residual = c - q * coeffs;
    return residual.colwise().norm().transpose();
}

}  // namespace detail

/// Orthonormal basis for (an m-dimensional approximation of) the column span of c.
///
/// SVD mode returns the m leading left singular vectors, m defaulting to the numerical
/// rank. IRLS mode starts there and repeatedly re-solves the SVD of c·diag(w) with
/// wⱼ = max(‖cⱼ − QQᵀcⱼ‖, floor)^{-1/2}; it stops when the relative change of
/// Σⱼ‖cⱼ − QQᵀcⱼ‖ drops below the tolerance and returns the best iterate seen.
template <typename Derived>
BasisResult<typename Derived::Scalar> get_basis(const Eigen::MatrixBase<Derived>& c,
                                                std::optional<Index> m,
                                                const SolverConfig& config = {}) {
    using Scalar = typename Derived::Scalar;
    config.validate();
    const Index full = std::min(c.rows(), c.cols());
    if (m && (*m < 1 || *m > full)) {
        throw InvalidArgument("get_basis: requested " + std::to_string(*m) +
                              " directions from a " + std::to_string(c.rows()) + "x" +
                              std::to_string(c.cols()) + " block");
    }

    const auto decomposition = svd(c);
    const Index rank = numerical_rank(decomposition.singular_values, c.rows(), c.cols());
    if (!m && rank == 0) {
        throw DegenerateBlock(0, "get_basis: block is numerically zero");
    }
    const Index width = m.value_or(rank);

    BasisResult<Scalar> out;
    out.singular_values = decomposition.singular_values;
    out.basis = decomposition.left_vectors.leftCols(width);
    out.padded = width > rank;

    if (config.mode == SolverMode::svd) {
        out.objective = detail::residual_norms(out.basis, c).squaredNorm();
        return out;
    }

    Scalar objective = detail::residual_norms(out.basis, c).sum();
    out.initial_objective = objective;
    out.objective = objective;
    Scalar previous = objective;
    Mat<Scalar> current = out.basis;
    const Scalar floor = static_cast<Scalar>(config.weight_floor);

    for (int it = 1; it <= config.max_iterations; ++it) {
        if (previous == Scalar(0)) {
            break;
        }
        const Vec<Scalar> residuals = detail::residual_norms(current, c);
        const Vec<Scalar> weights = residuals.cwiseMax(floor).cwiseSqrt().cwiseInverse();
        const Mat<Scalar> weighted = c * weights.asDiagonal();
        const auto reweighted = svd(weighted);
        const Index w = m ? *m
                          : std::max<Index>(1, numerical_rank(reweighted.singular_values,
                                                              weighted.rows(), weighted.cols()));
        current = reweighted.left_vectors.leftCols(w);
        objective = detail::residual_norms(current, c).sum();
        out.iterations = it;
        if (objective < out.objective) {
            out.objective = objective;
            out.basis = current;
        }
        const Scalar change = std::abs(previous - objective) /
                              std::max(previous, std::numeric_limits<Scalar>::min());
        previous = objective;
        if (change < static_cast<Scalar>(config.relative_tolerance)) {
            break;
        }
    }
    return out;
}

/// D = Q·R·Pᵀ with Q Stiefel coordinates of a flag, R block upper triangular and P the
/// hierarchy permutation.
template <typename Scalar>
struct FlagDecomposition {
    StiefelFlag<Scalar> flag;
    /// n_k × p; block (i, j) is zero for i > j.
    Mat<Scalar> weights;
    BlockPartition partition;
    SolverMode mode = SolverMode::svd;
    /// ‖D − QRPᵀ‖_F.
    Scalar residual = 0;
    std::vector<int> iterations_per_block;
    std::vector<bool> padded_blocks;

    const FlagType& flag_type() const noexcept { return flag.type(); }
    /// Rows/cols of block (i, j) of R.
    auto weight_block(std::size_t i, std::size_t j) const {
        const auto& t = flag.type();
        return weights.block(t.offset(i), partition.block_offset(j), t.width(i),
                             static_cast<Index>(partition.difference_sets.at(j).size()));
    }
};

namespace detail {

template <typename Derived>
void check_decomposition_inputs(const Eigen::MatrixBase<Derived>& data,
                                const ColumnHierarchy& hierarchy, const FlagType& type,
                                const std::vector<std::vector<Index>>& blocks) {
    if (!data.allFinite()) {
        throw InvalidArgument("flag_bmgs: data has non-finite entries");
    }
    if (data.cols() != hierarchy.width()) {
        throw InvalidArgument("flag_bmgs: hierarchy covers " + std::to_string(hierarchy.width()) +
                              " columns, data has " + std::to_string(data.cols()));
    }
    if (type.ambient() != data.rows()) {
        throw FlagTypeError("flag_bmgs: flag type " + type.to_string() + " does not match " +
                            std::to_string(data.rows()) + " data rows");
    }
    if (type.level_count() != hierarchy.level_count()) {
        throw FlagTypeError("flag_bmgs: flag type " + type.to_string() + " has " +
                            std::to_string(type.level_count()) + " levels, hierarchy has " +
                            std::to_string(hierarchy.level_count()));
    }
    if (type.top() > data.cols()) {
        throw FlagTypeError("flag_bmgs: n_k exceeds the column count");
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Index cap = std::min<Index>(data.rows(), static_cast<Index>(blocks[i].size()));
        if (type.width(i) > cap) {
            throw FlagTypeError("flag_bmgs: block " + std::to_string(i) + " has " +
                                std::to_string(blocks[i].size()) + " columns but flag type " +
                                type.to_string() + " asks for " +
                                std::to_string(type.width(i)) + " new directions");
        }
    }
}

}  // namespace detail

/// Flag-BMGS: hierarchy-preserving block modified Gram–Schmidt.
///
/// Columns are grouped into blocks Bᵢ = Aᵢ \ Aᵢ₋₁. For i = 1..k the already deflated
/// block Bᵢ yields Qᵢ = get_basis(Bᵢ, mᵢ) and R_{i,i} = QᵢᵀBᵢ; every later block is then
/// deflated, R_{i,j} = QᵢᵀBⱼ and Bⱼ ← Bⱼ − QᵢR_{i,j}.
template <typename Derived>
FlagDecomposition<typename Derived::Scalar> flag_bmgs(const Eigen::MatrixBase<Derived>& data,
                                                      const ColumnHierarchy& hierarchy,
                                                      const FlagType& type,
                                                      const SolverConfig& config = {}) {
    using Scalar = typename Derived::Scalar;
    config.validate();
    BlockPartition partition = build_permutation(hierarchy);
    detail::check_decomposition_inputs(data, hierarchy, type, partition.difference_sets);
    if (config.check_hierarchy) {
        validate_hierarchy(data, hierarchy);
    }

    const Index n = data.rows();
    const Index p = data.cols();
    const std::size_t k = type.level_count();
    const std::vector<Index> sizes = partition.block_sizes();

    const Mat<Scalar> permuted = data(Eigen::all, partition.column_order);
    Mat<Scalar> work = permuted;
    Mat<Scalar> q(n, type.top());
    Mat<Scalar> r = Mat<Scalar>::Zero(type.top(), p);
    std::vector<int> iterations(k, 0);
    std::vector<bool> padded(k, false);

    for (std::size_t i = 0; i < k; ++i) {
        const Index col = partition.block_offset(i);
        const Index width = type.width(i);
        const Index row = type.offset(i);

        auto block = work.middleCols(col, sizes[i]);
        const auto basis = get_basis(block, width, config);

        const Scalar scale = permuted.middleCols(col, sizes[i]).stableNorm();
        const Scalar cutoff = static_cast<Scalar>(tol::kDeflationRank) * scale;
        const Index directions =
            static_cast<Index>((basis.singular_values.array() > cutoff).count());
        if (directions < width) {
            throw DegenerateBlock(
                i, "flag_bmgs: block " + std::to_string(i) + " has " + std::to_string(directions) +
                       " new direction(s) after deflation, flag type " + type.to_string() +
                       " needs " + std::to_string(width));
        }

        q.middleCols(row, width) = basis.basis;
        iterations[i] = basis.iterations;
        padded[i] = basis.padded;

        const auto qi = q.middleCols(row, width);
        r.block(row, col, width, sizes[i]).noalias() = qi.transpose() * block;
        for (std::size_t j = i + 1; j < k; ++j) {
            const Index cj = partition.block_offset(j);
            auto later = work.middleCols(cj, sizes[j]);
            const Mat<Scalar> rij = qi.transpose() * later;
            r.block(row, cj, width, sizes[j]) = rij;
            later.noalias() -= qi * rij;
        }
    }

    const Scalar residual = (permuted - q * r).stableNorm();
    if (!std::isfinite(static_cast<double>(residual))) {
        throw NumericalFailure("flag_bmgs: non-finite residual");
    }
    return FlagDecomposition<Scalar>{StiefelFlag<Scalar>(std::move(q), type),
                                     std::move(r),
                                     std::move(partition),
                                     config.mode,
                                     residual,
                                     std::move(iterations),
                                     std::move(padded)};
}

/// Q·R·Pᵀ.
template <typename Scalar>
Mat<Scalar> reconstruct(const FlagDecomposition<Scalar>& fd) {
    const Mat<Scalar> qr = fd.flag.coordinates() * fd.weights;
    Mat<Scalar> out(qr.rows(), qr.cols());
    for (std::size_t j = 0; j < fd.partition.column_order.size(); ++j) {
        out.col(fd.partition.column_order[j]) = qr.col(static_cast<Index>(j));
    }
    return out;
}

/// Σᵢ Σ_{j∈Bᵢ} ‖Π_{Xᵢ⊥}⋯Π_{X₁⊥} dⱼ‖₂^q for q ∈ {1, 2}.
template <typename Scalar, typename Derived>
Scalar recovery_objective(const StiefelFlag<Scalar>& flag, const Eigen::MatrixBase<Derived>& data,
                          const ColumnHierarchy& hierarchy, int q) {
    if (q != 1 && q != 2) {
        throw InvalidArgument("recovery_objective: q must be 1 or 2");
    }
    if (flag.block_count() != hierarchy.level_count() || data.cols() != hierarchy.width() ||
        data.rows() != flag.type().ambient()) {
        throw InvalidArgument("recovery_objective: flag, data and hierarchy are incompatible");
    }
    const auto blocks = hierarchy.difference_sets();
    Scalar total(0);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        Mat<Scalar> residual = data(Eigen::all, blocks[i]);
        for (std::size_t l = 0; l <= i; ++l) {
            const auto xl = flag.block(l);
            const Mat<Scalar> coeffs = xl.transpose() * residual;
            residual.noalias() -= xl * coeffs;
        }
        total += q == 2 ? residual.squaredNorm() : residual.colwise().norm().sum();
    }
    return total;
}

/// Flag recovery methods compared throughout the experiments.
enum class RecoveryMethod {
    fd,        // Flag-BMGS with SVD blocks
    rfd,       // Flag-BMGS with IRLS-SVD blocks
    svd,       // leading n_k left singular vectors of the whole matrix
    irls_svd,  // IRLS-SVD on the whole matrix
};

std::string to_string(RecoveryMethod method);
RecoveryMethod parse_recovery_method(const std::string& text);

template <typename Scalar>
struct Recovery {
    StiefelFlag<Scalar> flag;
    /// Low-rank reconstruction of the input matrix.
    Mat<Scalar> reconstruction;
};

/// Recover a flag of the given type (and a reconstruction of data) with one of the
/// hierarchy-aware or hierarchy-blind methods. The hierarchy is ignored by svd/irls_svd.
template <typename Derived>
Recovery<typename Derived::Scalar> recover_flag(const Eigen::MatrixBase<Derived>& data,
                                                const ColumnHierarchy& hierarchy,
                                                const FlagType& type, RecoveryMethod method,
                                                SolverConfig config = {}) {
    using Scalar = typename Derived::Scalar;
    switch (method) {
        case RecoveryMethod::fd:
        case RecoveryMethod::rfd: {
            config.mode = method == RecoveryMethod::fd ? SolverMode::svd : SolverMode::irls_svd;
            auto fd = flag_bmgs(data, hierarchy, type, config);
            Mat<Scalar> rec = reconstruct(fd);
            return {std::move(fd.flag), std::move(rec)};
        }
        case RecoveryMethod::svd:
        case RecoveryMethod::irls_svd: {
            if (type.ambient() != data.rows()) {
                throw FlagTypeError("recover_flag: flag type does not match data rows");
            }
            if (type.top() > std::min(data.rows(), data.cols())) {
                throw FlagTypeError("recover_flag: n_k exceeds min(rows, cols)");
            }
            config.mode = method == RecoveryMethod::svd ? SolverMode::svd : SolverMode::irls_svd;
            const auto basis = get_basis(data, type.top(), config);
            Mat<Scalar> rec = basis.basis * (basis.basis.transpose() * data);
            return {flag_from_basis(basis.basis, type), std::move(rec)};
        }
    }
    throw InvalidArgument("recover_flag: unknown method");
}

}  // namespace flagdecomp

#endif
