#include "flagdecomp/fewshot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "flagdecomp/parallel.hpp"
#include "flagdecomp/random.hpp"

namespace flagdecomp {

Index FeatureEpisode::feature_dim() const {
    return support.empty() ? 0 : support.front().level1.rows();
}

void FeatureEpisode::validate() const {
    if (ways < 1 || static_cast<Index>(support.size()) != ways) {
        throw InvalidArgument("episode: support has " + std::to_string(support.size()) +
                              " classes, expected " + std::to_string(ways));
    }
    if (shots < 1) {
        throw InvalidArgument("episode: need at least one shot");
    }
    const Index n = feature_dim();
    for (const auto& cls : support) {
        if (cls.level1.rows() != n || cls.final.rows() != n || cls.level1.cols() != shots ||
            cls.final.cols() != shots) {
            throw InvalidArgument("episode: support features of class " +
                                  std::to_string(cls.label) + " are not " + std::to_string(n) +
                                  "x" + std::to_string(shots));
        }
    }
    for (const auto& q : queries) {
        if (q.level1.size() != n || q.final.size() != n) {
            throw InvalidArgument("episode: query feature length mismatch");
        }
    }
}

MatrixXd stack_features(const MatrixXd& level1, const MatrixXd& final) {
    if (level1.rows() != final.rows() || level1.cols() != final.cols()) {
        throw InvalidArgument("stack_features: shape mismatch");
    }
    MatrixXd out(level1.rows() * 2, level1.cols());
    out << level1, final;
    return out;
}

VectorXd stack_features(const VectorXd& level1, const VectorXd& final) {
    if (level1.size() != final.size()) {
        throw InvalidArgument("stack_features: length mismatch");
    }
    VectorXd out(level1.size() * 2);
    out << level1, final;
    return out;
}

FlagPrototype flag_prototype(const MatrixXd& level1, const MatrixXd& final, int label) {
    if (level1.rows() != final.rows() || level1.cols() != final.cols()) {
        throw InvalidArgument("flag_prototype: level-1 and final features differ in shape");
    }
    const Index shots = level1.cols();
    if (shots < 2) {
        throw DomainError("flag_prototype: flag prototypes need at least 2 shots");
    }
    MatrixXd data(level1.rows(), 2 * shots);
    data << level1, final;
    const FlagType type({shots - 1, 2 * (shots - 1)}, data.rows());
    auto fd = flag_bmgs(data, feature_hierarchy(shots), type);
    return FlagPrototype{std::move(fd.flag), label};
}

double flag_query_distance(const FlagPrototype& proto, const VectorXd& level1,
                           const VectorXd& final, bool normalized) {
    const Index n = proto.flag.type().ambient();
    if (level1.size() != n || final.size() != n) {
        throw InvalidArgument("flag_query_distance: query length does not match the prototype");
    }
    auto residual = [](const auto& q, VectorXd v, bool unit) {
        if (unit) {
            const double norm = v.norm();
            if (norm > 0.0) v /= norm;
        }
        const VectorXd coeffs = q.transpose() * v;
        return (v - q * coeffs).squaredNorm();
    };
    return residual(proto.flag.block(0), level1, normalized) +
           residual(proto.flag.block(1), final, normalized);
}

double euclidean_prototype_distance(const MatrixXd& support, const VectorXd& query) {
    if (support.rows() != query.size() || support.cols() < 1) {
        throw InvalidArgument("euclidean_prototype_distance: dimension mismatch");
    }
    return (support.rowwise().mean() - query).squaredNorm();
}

namespace {

MatrixXd subspace_basis(const MatrixXd& support, Index shots) {
    if (shots < 2) {
        throw DomainError("subspace prototypes need at least 2 shots");
    }
    const Index dim = shots - 1;
    if (dim > std::min(support.rows(), support.cols())) {
        throw InvalidArgument("subspace prototype: support too small for dimension " +
                              std::to_string(dim));
    }
    return svd(support).left_vectors.leftCols(dim);
}

double subspace_residual(const MatrixXd& basis, const VectorXd& query) {
    const VectorXd coeffs = basis.transpose() * query;
    return (query - basis * coeffs).squaredNorm();
}

}  // namespace

double subspace_prototype_distance(const MatrixXd& support, const VectorXd& query, Index shots) {
    if (support.rows() != query.size()) {
        throw InvalidArgument("subspace_prototype_distance: dimension mismatch");
    }
    return subspace_residual(subspace_basis(support, shots), query);
}

std::string to_string(FewShotMethod method) {
    switch (method) {
        case FewShotMethod::flag: return "flag";
        case FewShotMethod::euclidean: return "euclidean";
        case FewShotMethod::subspace: return "subspace";
    }
    return "?";
}

FewShotMethod parse_fewshot_method(const std::string& text) {
    if (text == "flag") return FewShotMethod::flag;
    if (text == "euclidean") return FewShotMethod::euclidean;
    if (text == "subspace") return FewShotMethod::subspace;
    throw InvalidArgument("unknown few-shot method '" + text + "'");
}

std::vector<int> classify_episode(const FeatureEpisode& episode, FewShotMethod method,
                                  const FewShotOptions& options) {
    episode.validate();
    const bool stacked = options.baseline_view == BaselineView::stacked;
    const auto view = [&](const VectorXd& f1, const VectorXd& f) {
        return stacked ? stack_features(f1, f) : f;
    };

    // Per-class distance functions, built once per episode.
    std::vector<FlagPrototype> flags;
    std::vector<MatrixXd> bases;
    std::vector<VectorXd> means;
    for (const auto& cls : episode.support) {
        const MatrixXd support = stacked ? stack_features(cls.level1, cls.final) : cls.final;
        switch (method) {
            case FewShotMethod::flag:
                flags.push_back(flag_prototype(cls.level1, cls.final, cls.label));
                break;
            case FewShotMethod::subspace:
                bases.push_back(subspace_basis(support, episode.shots));
                break;
            case FewShotMethod::euclidean:
                means.push_back(support.rowwise().mean());
                break;
        }
    }

    std::vector<int> predicted;
    predicted.reserve(episode.queries.size());
    for (const auto& q : episode.queries) {
        double best = std::numeric_limits<double>::infinity();
        int label = episode.support.front().label;
        for (std::size_t c = 0; c < episode.support.size(); ++c) {
            double d = 0.0;
            switch (method) {
                case FewShotMethod::flag:
                    d = flag_query_distance(flags[c], q.level1, q.final, options.normalize_queries);
                    break;
                case FewShotMethod::subspace:
                    d = subspace_residual(bases[c], view(q.level1, q.final));
                    break;
                case FewShotMethod::euclidean:
                    d = (means[c] - view(q.level1, q.final)).squaredNorm();
                    break;
            }
            if (d < best) {
                best = d;
                label = episode.support[c].label;
            }
        }
        predicted.push_back(label);
    }
    return predicted;
}

double episode_accuracy(const FeatureEpisode& episode, FewShotMethod method,
                        const FewShotOptions& options) {
    if (episode.queries.empty()) {
        throw InvalidArgument("episode_accuracy: episode has no queries");
    }
    const auto predicted = classify_episode(episode, method, options);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == episode.queries[i].label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

AccuracyStats evaluate_episodes(const std::vector<std::vector<FeatureEpisode>>& trials,
                                FewShotMethod method, const FewShotOptions& options,
                                int threads) {
    if (trials.empty()) {
        throw InvalidArgument("evaluate_episodes: no trials");
    }
    AccuracyStats out;
    out.per_trial.assign(trials.size(), 0.0);
    parallel_for(trials.size(), threads, [&](std::size_t t) {
        std::size_t correct = 0;
        std::size_t total = 0;
        for (const auto& episode : trials[t]) {
            const auto predicted = classify_episode(episode, method, options);
            for (std::size_t i = 0; i < predicted.size(); ++i) {
                if (predicted[i] == episode.queries[i].label) ++correct;
            }
            total += predicted.size();
        }
        if (total == 0) {
            throw InvalidArgument("evaluate_episodes: trial without queries");
        }
        out.per_trial[t] = static_cast<double>(correct) / static_cast<double>(total);
    });
    const double n = static_cast<double>(trials.size());
    out.mean = std::accumulate(out.per_trial.begin(), out.per_trial.end(), 0.0) / n;
    double var = 0.0;
    for (const double a : out.per_trial) var += (a - out.mean) * (a - out.mean);
    out.stddev = std::sqrt(var / n);
    return out;
}

std::vector<FeatureEpisode> sample_episodes(const FeaturePool& pool, Index ways, Index shots,
                                            Index tasks, Index queries, std::uint64_t seed) {
    const std::size_t classes = pool.labels.size();
    if (classes == 0 || pool.level1.size() != classes || pool.final.size() != classes) {
        throw InvalidArgument("sample_episodes: malformed feature pool");
    }
    if (ways < 1 || static_cast<std::size_t>(ways) > classes) {
        throw InvalidArgument("sample_episodes: ways exceeds the number of classes");
    }
    if (shots < 1 || tasks < 1 || queries < 1) {
        throw InvalidArgument("sample_episodes: shots, tasks and queries must be positive");
    }
    const bool query_pool = !pool.query_labels.empty();
    if (query_pool && (pool.query_level1.cols() != static_cast<Index>(pool.query_labels.size()) ||
                       pool.query_final.cols() != pool.query_level1.cols())) {
        throw InvalidArgument("sample_episodes: query pool sizes disagree");
    }

    std::vector<FeatureEpisode> out;
    out.reserve(static_cast<std::size_t>(tasks));
    for (Index t = 0; t < tasks; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> order(classes);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(static_cast<std::size_t>(ways));

        FeatureEpisode episode;
        episode.ways = ways;
        episode.shots = shots;
        std::vector<std::vector<Index>> leftovers;
        for (const std::size_t c : order) {
            const Index available = pool.level1[c].cols();
            if (available < shots + (query_pool ? 0 : 1)) {
                throw InvalidArgument("sample_episodes: class " + std::to_string(pool.labels[c]) +
                                      " has too few samples");
            }
            std::vector<Index> cols(static_cast<std::size_t>(available));
            std::iota(cols.begin(), cols.end(), Index{0});
            std::shuffle(cols.begin(), cols.end(), rng);
            const std::vector<Index> chosen(cols.begin(), cols.begin() + shots);
            episode.support.push_back(
                {pool.labels[c], pool.level1[c](Eigen::all, chosen), pool.final[c](Eigen::all, chosen)});
            leftovers.emplace_back(cols.begin() + shots, cols.end());
        }

        for (Index qi = 0; qi < queries; ++qi) {
            const auto slot = static_cast<std::size_t>(qi % ways);
            const std::size_t c = order[slot];
            const int label = pool.labels[c];
            if (query_pool) {
                std::vector<Index> candidates;
                for (std::size_t j = 0; j < pool.query_labels.size(); ++j) {
                    if (pool.query_labels[j] == label) candidates.push_back(static_cast<Index>(j));
                }
                if (candidates.empty()) {
                    throw InvalidArgument("sample_episodes: no queries for class " +
                                          std::to_string(label));
                }
                std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
                const Index j = candidates[pick(rng)];
                episode.queries.push_back(
                    {pool.query_level1.col(j), pool.query_final.col(j), label});
            } else {
                const auto& rest = leftovers[slot];
                std::uniform_int_distribution<std::size_t> pick(0, rest.size() - 1);
                const Index j = rest[pick(rng)];
                episode.queries.push_back({pool.level1[c].col(j), pool.final[c].col(j), label});
            }
        }
        out.push_back(std::move(episode));
    }
    return out;
}

}  // namespace flagdecomp
