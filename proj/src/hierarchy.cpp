#include "flagdecomp/hierarchy.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

namespace flagdecomp {

ColumnHierarchy::ColumnHierarchy(std::vector<std::vector<Index>> levels)
    : levels_(std::move(levels)) {
    if (levels_.empty()) {
        throw InvalidArgument("column hierarchy needs at least one level");
    }
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        auto& level = levels_[i];
        if (level.empty()) {
            throw InvalidArgument("hierarchy level " + std::to_string(i) + " is empty");
        }
        std::sort(level.begin(), level.end());
        if (std::adjacent_find(level.begin(), level.end()) != level.end()) {
            throw InvalidArgument("hierarchy level " + std::to_string(i) +
                                  " has duplicate indices");
        }
        if (level.front() < 0) {
            throw InvalidArgument("hierarchy level " + std::to_string(i) +
                                  " has a negative index");
        }
        if (i > 0) {
            const auto& prev = levels_[i - 1];
            if (level.size() <= prev.size() ||
                !std::includes(level.begin(), level.end(), prev.begin(), prev.end())) {
                throw InvalidArgument("hierarchy level " + std::to_string(i - 1) +
                                      " is not a proper subset of level " + std::to_string(i));
            }
        }
    }
    const auto& last = levels_.back();
    if (last.back() != static_cast<Index>(last.size()) - 1) {
        throw InvalidArgument("last hierarchy level must be {0, ..., p-1}");
    }
}

std::vector<std::vector<Index>> ColumnHierarchy::difference_sets() const {
    std::vector<std::vector<Index>> out;
    out.reserve(levels_.size());
    std::vector<Index> prev;
    for (const auto& level : levels_) {
        std::vector<Index> diff;
        std::set_difference(level.begin(), level.end(), prev.begin(), prev.end(),
                            std::back_inserter(diff));
        out.push_back(std::move(diff));
        prev = level;
    }
    return out;
}

std::vector<Index> BlockPartition::block_sizes() const {
    std::vector<Index> sizes;
    sizes.reserve(difference_sets.size());
    for (const auto& b : difference_sets) {
        sizes.push_back(static_cast<Index>(b.size()));
    }
    return sizes;
}

Index BlockPartition::block_offset(std::size_t i) const {
    Index offset = 0;
    for (std::size_t j = 0; j < i; ++j) {
        offset += static_cast<Index>(difference_sets.at(j).size());
    }
    return offset;
}

BlockPartition build_permutation(const ColumnHierarchy& hierarchy) {
    BlockPartition out;
    out.difference_sets = hierarchy.difference_sets();
    const Index p = hierarchy.width();
    out.column_order.reserve(static_cast<std::size_t>(p));
    for (const auto& b : out.difference_sets) {
        out.column_order.insert(out.column_order.end(), b.begin(), b.end());
    }
    out.permutation = MatrixXd::Zero(p, p);
    for (Index j = 0; j < p; ++j) {
        out.permutation(out.column_order[static_cast<std::size_t>(j)], j) = 1.0;
    }
    return out;
}

ColumnHierarchy neighborhood_hierarchy(const std::vector<Index>& patch_sizes) {
    if (patch_sizes.empty()) {
        throw InvalidArgument("neighborhood_hierarchy: no patch sizes");
    }
    for (std::size_t i = 0; i < patch_sizes.size(); ++i) {
        if (patch_sizes[i] < 1 || patch_sizes[i] % 2 == 0) {
            throw InvalidArgument("neighborhood_hierarchy: patch sizes must be odd and positive");
        }
        if (i > 0 && patch_sizes[i] <= patch_sizes[i - 1]) {
            throw InvalidArgument("neighborhood_hierarchy: patch sizes must strictly increase");
        }
    }
    const Index side = patch_sizes.back();
    std::vector<std::vector<Index>> levels;
    for (const Index size : patch_sizes) {
        const Index lo = (side - size) / 2;
        std::vector<Index> level;
        for (Index r = lo; r < lo + size; ++r) {
            for (Index c = lo; c < lo + size; ++c) {
                level.push_back(r * side + c);
            }
        }
        levels.push_back(std::move(level));
    }
    return ColumnHierarchy(std::move(levels));
}

ColumnHierarchy band_hierarchy(const std::vector<Index>& cutoffs, Index total_bands) {
    if (cutoffs.empty() || cutoffs.back() != total_bands) {
        throw InvalidArgument("band_hierarchy: last cutoff must equal the band count");
    }
    std::vector<std::vector<Index>> levels;
    Index prev = 0;
    for (const Index cut : cutoffs) {
        if (cut <= prev) {
            throw InvalidArgument("band_hierarchy: cutoffs must be positive and strictly increase");
        }
        std::vector<Index> level(static_cast<std::size_t>(cut));
        std::iota(level.begin(), level.end(), Index{0});
        levels.push_back(std::move(level));
        prev = cut;
    }
    return ColumnHierarchy(std::move(levels));
}

ColumnHierarchy feature_hierarchy(Index shots) {
    if (shots < 1) {
        throw InvalidArgument("feature_hierarchy: need at least one shot");
    }
    std::vector<Index> first(static_cast<std::size_t>(shots));
    std::iota(first.begin(), first.end(), Index{0});
    std::vector<Index> all(static_cast<std::size_t>(2 * shots));
    std::iota(all.begin(), all.end(), Index{0});
    return ColumnHierarchy({std::move(first), std::move(all)});
}

}  // namespace flagdecomp
