#ifndef FLAGDECOMP_ANALYSIS_HPP
#define FLAGDECOMP_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "flagdecomp/decompose.hpp"
#include "flagdecomp/flagspace.hpp"
#include "flagdecomp/hierarchy.hpp"

namespace flagdecomp {

enum class DistanceMetric { flag_chordal, grassmann_product_sum, euclidean_flat };

std::string to_string(DistanceMetric metric);
DistanceMetric parse_distance_metric(const std::string& text);

/// Symmetric N × N matrix of nonnegative distances with an exactly zero diagonal.
class DistanceMatrix {
public:
    DistanceMatrix(MatrixXd entries, DistanceMetric metric);

    const MatrixXd& entries() const noexcept { return entries_; }
    DistanceMetric metric() const noexcept { return metric_; }
    Index size() const noexcept { return entries_.rows(); }
    double operator()(Index a, Index b) const { return entries_(a, b); }

private:
    MatrixXd entries_;
    DistanceMetric metric_;
};

/// Matrices sharing one shape, optionally labeled.
struct LabeledCollection {
    std::vector<MatrixXd> items;
    std::vector<int> labels;
};

/// How each item of a collection is turned into a flag.
struct FlagExtraction {
    ColumnHierarchy hierarchy;
    std::vector<Index> signature;  // ambient dimension comes from the item row count
    RecoveryMethod method = RecoveryMethod::fd;
    SolverConfig solver{};
};

std::vector<Flag> extract_flags(const LabeledCollection& collection,
                                const FlagExtraction& extraction, int threads = 1);

/// Pairwise distances between flags (flag_chordal or grassmann_product_sum).
DistanceMatrix distance_matrix(const std::vector<Flag>& flags, DistanceMetric metric,
                               int threads = 1);

/// Pairwise distances over a collection: flattened Euclidean, or flag distances after
/// extracting one flag per item.
DistanceMatrix distance_matrix(const LabeledCollection& collection, DistanceMetric metric,
                               const FlagExtraction* extraction, int threads = 1);

/// Classical (Torgerson) MDS: top eigenpairs of −½·J·D²·J; negative eigenvalues clamp to 0.
MatrixXd classical_mds(const DistanceMatrix& dist, Index dim);

struct KnnResult {
    /// Indices of the classified (non-training) items, ascending.
    std::vector<Index> evaluated;
    std::vector<int> predicted;
    double accuracy = 0.0;
};

/// Majority vote among the k nearest training items. Ties go to the tied class that owns
/// the nearest neighbour; equal distances are ordered by item index.
KnnResult knn_classify(const DistanceMatrix& dist, const std::vector<int>& labels, Index k,
                       const std::vector<bool>& train_mask);

/// Seeded per-class split; each class contributes round(fraction·count) training items
/// (at least one).
std::vector<bool> stratified_split(const std::vector<int>& labels, double train_fraction,
                                   std::uint64_t seed);

/// Mean silhouette coefficient of a labeling under a precomputed distance matrix.
double silhouette_score(const DistanceMatrix& dist, const std::vector<int>& labels);

}  // namespace flagdecomp

#endif
