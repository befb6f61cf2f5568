#ifndef FLAGDECOMP_HIERARCHY_HPP
#define FLAGDECOMP_HIERARCHY_HPP

#include <string>
#include <vector>

#include "flagdecomp/linalg.hpp"

namespace flagdecomp {

/// Nested column index sets A₁ ⊊ A₂ ⊊ … ⊊ A_k = {0, …, p−1}.
///
/// Indices are 0-based. Each level is stored sorted and duplicate-free; the
/// constructor rejects anything that is not strictly nested or does not end in
/// the full column range.
class ColumnHierarchy {
public:
    explicit ColumnHierarchy(std::vector<std::vector<Index>> levels);

    const std::vector<std::vector<Index>>& levels() const noexcept { return levels_; }
    const std::vector<Index>& level(std::size_t i) const { return levels_.at(i); }
    std::size_t level_count() const noexcept { return levels_.size(); }
    /// Width p of the matrices this hierarchy indexes.
    Index width() const noexcept { return static_cast<Index>(levels_.back().size()); }

    /// Bᵢ = Aᵢ \ Aᵢ₋₁, ascending.
    std::vector<std::vector<Index>> difference_sets() const;

    friend bool operator==(const ColumnHierarchy&, const ColumnHierarchy&) = default;

private:
    std::vector<std::vector<Index>> levels_;
};

/// Difference sets and the permutation P with D·P = [D_{B₁} | … | D_{B_k}].
struct BlockPartition {
    std::vector<std::vector<Index>> difference_sets;
    /// column_order[j] is the original column placed at position j of D·P.
    std::vector<Index> column_order;
    MatrixXd permutation;

    std::vector<Index> block_sizes() const;
    /// Offset of block i inside D·P.
    Index block_offset(std::size_t i) const;
};

BlockPartition build_permutation(const ColumnHierarchy& hierarchy);

/// Centered square sub-patches of a row-major p_k × p_k pixel grid. Sizes must be odd
/// and strictly increasing.
ColumnHierarchy neighborhood_hierarchy(const std::vector<Index>& patch_sizes);

/// Prefix sets {0, …, cutoffᵢ − 1}; the last cutoff must equal total_bands.
ColumnHierarchy band_hierarchy(const std::vector<Index>& cutoffs, Index total_bands);

/// {0, …, s−1} ⊂ {0, …, 2s−1}: first-stage features of s samples, then final features.
ColumnHierarchy feature_hierarchy(Index shots);

/// Numerical ranks nᵢ = rank(D_{Aᵢ}); throws HierarchyViolation unless strictly increasing.
template <typename Derived>
std::vector<Index> validate_hierarchy(const Eigen::MatrixBase<Derived>& data,
                                      const ColumnHierarchy& hierarchy) {
    if (data.cols() != hierarchy.width()) {
        throw InvalidArgument("validate_hierarchy: hierarchy covers " +
                              std::to_string(hierarchy.width()) + " columns, matrix has " +
                              std::to_string(data.cols()));
    }
    std::vector<Index> ranks;
    ranks.reserve(hierarchy.level_count());
    for (std::size_t i = 0; i < hierarchy.level_count(); ++i) {
        const auto& cols = hierarchy.level(i);
        const Index rank = numerical_rank(data(Eigen::all, cols));
        if (rank == 0) {
            throw HierarchyViolation(i, "level 0 spans the zero subspace");
        }
        if (!ranks.empty() && rank <= ranks.back()) {
            throw HierarchyViolation(
                i, "rank does not increase at level " + std::to_string(i) + " (" +
                       std::to_string(ranks.back()) + " -> " + std::to_string(rank) + ")");
        }
        ranks.push_back(rank);
    }
    return ranks;
}

}  // namespace flagdecomp

#endif
