#include "flagdecomp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include "flagdecomp/parallel.hpp"
#include "flagdecomp/random.hpp"

namespace flagdecomp {

std::string to_string(DistanceMetric metric) {
    switch (metric) {
        case DistanceMetric::flag_chordal: return "flag_chordal";
        case DistanceMetric::grassmann_product_sum: return "grassmann_product_sum";
        case DistanceMetric::euclidean_flat: return "euclidean_flat";
    }
    return "?";
}

DistanceMetric parse_distance_metric(const std::string& text) {
    if (text == "flag_chordal") return DistanceMetric::flag_chordal;
    if (text == "grassmann_product_sum") return DistanceMetric::grassmann_product_sum;
    if (text == "euclidean_flat") return DistanceMetric::euclidean_flat;
    throw InvalidArgument("unknown distance metric '" + text + "'");
}

DistanceMatrix::DistanceMatrix(MatrixXd entries, DistanceMetric metric)
    : entries_(std::move(entries)), metric_(metric) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw InvalidArgument("distance matrix must be square and nonempty");
    }
    if (!entries_.allFinite()) {
        throw InvalidArgument("distance matrix has non-finite entries");
    }
    if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, entries_.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("distance matrix is not symmetric");
    }
    if (entries_.diagonal().cwiseAbs().maxCoeff() != 0.0) {
        throw InvalidArgument("distance matrix diagonal must be zero");
    }
    if (entries_.minCoeff() < 0.0) {
        throw InvalidArgument("distance matrix has negative entries");
    }
}

std::vector<Flag> extract_flags(const LabeledCollection& collection,
                                const FlagExtraction& extraction, int threads) {
    if (collection.items.empty()) {
        throw InvalidArgument("extract_flags: empty collection");
    }
    const Index rows = collection.items.front().rows();
    const Index cols = collection.items.front().cols();
    for (const auto& item : collection.items) {
        if (item.rows() != rows || item.cols() != cols) {
            throw InvalidArgument("extract_flags: items have different shapes");
        }
    }
    const FlagType type(extraction.signature, rows);
    std::vector<std::optional<Flag>> slots(collection.items.size());
    parallel_for(slots.size(), threads, [&](std::size_t i) {
        slots[i] = recover_flag(collection.items[i], extraction.hierarchy, type,
                                extraction.method, extraction.solver)
                       .flag;
    });
    std::vector<Flag> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

namespace {

template <typename Pairwise>
MatrixXd fill_symmetric(Index n, int threads, Pairwise&& pairwise) {
    MatrixXd d = MatrixXd::Zero(n, n);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
        const Index a = static_cast<Index>(row);
        for (Index b = a + 1; b < n; ++b) {
            d(a, b) = pairwise(a, b);
        }
    });
    d.triangularView<Eigen::StrictlyLower>() = d.transpose();
    return d;
}

}  // namespace

DistanceMatrix distance_matrix(const std::vector<Flag>& flags, DistanceMetric metric,
                               int threads) {
    if (flags.empty()) {
        throw InvalidArgument("distance_matrix: no flags");
    }
    if (metric == DistanceMetric::euclidean_flat) {
        throw InvalidArgument("distance_matrix: euclidean_flat needs the raw matrices");
    }
    for (const auto& f : flags) {
        if (!(f.type() == flags.front().type())) {
            throw InvalidArgument("distance_matrix: flags have different types");
        }
    }
    const auto n = static_cast<Index>(flags.size());
    MatrixXd d = fill_symmetric(n, threads, [&](Index a, Index b) {
        const auto& x = flags[static_cast<std::size_t>(a)];
        const auto& y = flags[static_cast<std::size_t>(b)];
        return metric == DistanceMetric::flag_chordal ? flag_chordal(x, y)
                                                      : grassmann_product_sum(x, y);
    });
    return DistanceMatrix(std::move(d), metric);
}

DistanceMatrix distance_matrix(const LabeledCollection& collection, DistanceMetric metric,
                               const FlagExtraction* extraction, int threads) {
    if (collection.items.empty()) {
        throw InvalidArgument("distance_matrix: empty collection");
    }
    if (!collection.labels.empty() && collection.labels.size() != collection.items.size()) {
        throw InvalidArgument("distance_matrix: label count does not match item count");
    }
    if (metric != DistanceMetric::euclidean_flat) {
        if (extraction == nullptr) {
            throw InvalidArgument("distance_matrix: flag metrics need a flag extraction");
        }
        return distance_matrix(extract_flags(collection, *extraction, threads), metric, threads);
    }
    const auto& first = collection.items.front();
    for (const auto& item : collection.items) {
        if (item.rows() != first.rows() || item.cols() != first.cols()) {
            throw InvalidArgument("distance_matrix: items have different shapes");
        }
    }
    const auto n = static_cast<Index>(collection.items.size());
    MatrixXd d = fill_symmetric(n, threads, [&](Index a, Index b) {
        return (collection.items[static_cast<std::size_t>(a)] -
                collection.items[static_cast<std::size_t>(b)])
            .norm();
    });
    return DistanceMatrix(std::move(d), metric);
}

MatrixXd classical_mds(const DistanceMatrix& dist, Index dim) {
    const Index n = dist.size();
    if (dim < 1 || dim >= n) {
        throw InvalidArgument("classical_mds: need 1 <= dim < N");
    }
    const MatrixXd squared = dist.entries().array().square().matrix();
    const MatrixXd centering =
        MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    MatrixXd gram = -0.5 * centering * squared * centering;
    gram = 0.5 * (gram + gram.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) {
        throw NumericalFailure("classical_mds: eigendecomposition failed");
    }
    MatrixXd coords(n, dim);
    for (Index c = 0; c < dim; ++c) {
        const Index src = n - 1 - c;  // eigenvalues ascend
        VectorXd v = eig.eigenvectors().col(src);
        Index pivot = 0;
        v.cwiseAbs().maxCoeff(&pivot);
        if (v(pivot) < 0) v = -v;
        coords.col(c) = v * std::sqrt(std::max(eig.eigenvalues()(src), 0.0));
    }
    return coords;
}

KnnResult knn_classify(const DistanceMatrix& dist, const std::vector<int>& labels, Index k,
                       const std::vector<bool>& train_mask) {
    const auto n = static_cast<std::size_t>(dist.size());
    if (labels.size() != n || train_mask.size() != n) {
        throw InvalidArgument("knn_classify: labels/mask size does not match distance matrix");
    }
    std::vector<Index> train;
    std::vector<Index> test;
    for (std::size_t i = 0; i < n; ++i) {
        (train_mask[i] ? train : test).push_back(static_cast<Index>(i));
    }
    if (train.empty()) {
        throw InvalidArgument("knn_classify: empty training set");
    }
    if (k < 1 || k > static_cast<Index>(train.size())) {
        throw InvalidArgument("knn_classify: need 1 <= k <= training size");
    }
    if (test.empty()) {
        throw InvalidArgument("knn_classify: nothing to classify");
    }

    KnnResult out;
    out.evaluated = test;
    std::size_t correct = 0;
    std::vector<Index> order = train;
    for (const Index q : test) {
        std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
            const double da = dist(q, a);
            const double db = dist(q, b);
            return da < db || (da == db && a < b);
        });
        std::map<int, Index> votes;
        for (Index j = 0; j < k; ++j) {
            ++votes[labels[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]];
        }
        Index best = 0;
        for (const auto& [label, count] : votes) best = std::max(best, count);
        int winner = 0;
        for (Index j = 0; j < k; ++j) {
            const int label = labels[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
            if (votes[label] == best) {
                winner = label;
                break;
            }
        }
        out.predicted.push_back(winner);
        if (winner == labels[static_cast<std::size_t>(q)]) ++correct;
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    return out;
}

std::vector<bool> stratified_split(const std::vector<int>& labels, double train_fraction,
                                   std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        throw InvalidArgument("stratified_split: fraction must be in (0, 1]");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    Rng rng(seed);
    std::vector<bool> mask(labels.size(), false);
    for (auto& [label, members] : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        const auto take = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(members.size()))),
            1, members.size());
        for (std::size_t i = 0; i < take; ++i) mask[members[i]] = true;
    }
    return mask;
}

double silhouette_score(const DistanceMatrix& dist, const std::vector<int>& labels) {
    const auto n = static_cast<std::size_t>(dist.size());
    if (labels.size() != n) {
        throw InvalidArgument("silhouette_score: label count mismatch");
    }
    std::map<int, std::size_t> sizes;
    for (const int l : labels) ++sizes[l];
    if (sizes.size() < 2) {
        throw InvalidArgument("silhouette_score: need at least two clusters");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::map<int, double> sums;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[labels[j]] += dist(static_cast<Index>(i), static_cast<Index>(j));
        }
        const std::size_t own = sizes[labels[i]];
        if (own == 1) continue;  // singleton clusters score 0
        const double a = sums[labels[i]] / static_cast<double>(own - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [label, size] : sizes) {
            if (label != labels[i]) b = std::min(b, sums[label] / static_cast<double>(size));
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

}  // namespace flagdecomp
