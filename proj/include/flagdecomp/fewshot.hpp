#ifndef FLAGDECOMP_FEWSHOT_HPP
#define FLAGDECOMP_FEWSHOT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "flagdecomp/decompose.hpp"
#include "flagdecomp/flagspace.hpp"

namespace flagdecomp {

/// Support features of one class: level-1 (first extractor stage) and final features,
/// both n × s with one column per shot.
struct ClassSupport {
    int label = 0;
    MatrixXd level1;
    MatrixXd final;
};

struct Query {
    VectorXd level1;
    VectorXd final;
    int label = 0;
};

struct FeatureEpisode {
    Index ways = 0;
    Index shots = 0;
    std::vector<ClassSupport> support;
    std::vector<Query> queries;

    Index feature_dim() const;
    /// Throws InvalidArgument on inconsistent dimensions or counts.
    void validate() const;
};

/// Flag of type (s−1, 2(s−1); n) representing one class.
struct FlagPrototype {
    Flag flag;
    int label = 0;
};

/// Flag-BMGS on [F¹ | F] with hierarchy {0..s−1} ⊂ {0..2s−1} and type (s−1, 2(s−1); n).
FlagPrototype flag_prototype(const MatrixXd& level1, const MatrixXd& final, int label = 0);

/// ‖Π_{Q₁⊥} f¹‖² + ‖Π_{Q₂⊥} f‖². With `normalized`, both query vectors are scaled to
/// unit length first.
double flag_query_distance(const FlagPrototype& proto, const VectorXd& level1,
                           const VectorXd& final, bool normalized = false);

/// Squared distance between a query and the mean of the support columns.
double euclidean_prototype_distance(const MatrixXd& support, const VectorXd& query);

/// ‖q − QQᵀq‖² with Q the s−1 leading left singular vectors of the (uncentered) support.
double subspace_prototype_distance(const MatrixXd& support, const VectorXd& query, Index shots);

/// Stack (f¹; f) column-wise.
MatrixXd stack_features(const MatrixXd& level1, const MatrixXd& final);
VectorXd stack_features(const VectorXd& level1, const VectorXd& final);

enum class FewShotMethod { flag, euclidean, subspace };
std::string to_string(FewShotMethod method);
FewShotMethod parse_fewshot_method(const std::string& text);

/// Which features the mean/subspace baselines see.
enum class BaselineView { stacked, final_only };

struct FewShotOptions {
    BaselineView baseline_view = BaselineView::stacked;
    bool normalize_queries = false;
};

/// Predicted label per query (argmin distance; ties go to the earlier support class).
std::vector<int> classify_episode(const FeatureEpisode& episode, FewShotMethod method,
                                  const FewShotOptions& options = {});
double episode_accuracy(const FeatureEpisode& episode, FewShotMethod method,
                        const FewShotOptions& options = {});

struct AccuracyStats {
    double mean = 0.0;
    double stddev = 0.0;  // population std over trials
    std::vector<double> per_trial;
};

/// Accuracy over all queries of each trial, then mean and std across trials.
AccuracyStats evaluate_episodes(const std::vector<std::vector<FeatureEpisode>>& trials,
                                FewShotMethod method, const FewShotOptions& options = {},
                                int threads = 1);

/// Per-class feature pools from which episodes are drawn.
struct FeaturePool {
    std::vector<int> labels;            // one entry per class
    std::vector<MatrixXd> level1;       // n × count per class
    std::vector<MatrixXd> final;        // n × count per class
    /// Optional dedicated query pool; when empty, queries are drawn from the class
    /// columns not used as shots.
    MatrixXd query_level1;
    MatrixXd query_final;
    std::vector<int> query_labels;
};

/// Draws `tasks` episodes of `ways` classes with `shots` shots and `queries` queries each.
std::vector<FeatureEpisode> sample_episodes(const FeaturePool& pool, Index ways, Index shots,
                                            Index tasks, Index queries, std::uint64_t seed);

}  // namespace flagdecomp

#endif
