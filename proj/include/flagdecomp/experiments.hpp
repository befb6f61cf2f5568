#ifndef FLAGDECOMP_EXPERIMENTS_HPP
#define FLAGDECOMP_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flagdecomp/analysis.hpp"
#include "flagdecomp/decompose.hpp"
#include "flagdecomp/synthgen.hpp"

namespace flagdecomp {

/// One method applied to one seeded instance.
struct TrialRow {
    int trial = 0;
    RecoveryMethod method = RecoveryMethod::fd;
    /// Noise scale or outlier count.
    double setting = 0.0;
    double chordal = 0.0;
    double lrse = 0.0;
    double snr = 0.0;
};

struct RecoverySweepConfig {
    std::vector<Index> signature{2, 4};
    Index ambient = 10;
    std::vector<Index> block_sizes{20, 20};
    NoiseDistribution distribution = NoiseDistribution::gaussian;
    /// Noise scales (noise model) or outlier counts (outlier model).
    std::vector<double> settings{0.1, 0.3, 0.5, 0.7, 0.9};
    int trials = 100;
    std::uint64_t seed = 0;
    std::vector<RecoveryMethod> methods{RecoveryMethod::fd, RecoveryMethod::rfd,
                                        RecoveryMethod::svd, RecoveryMethod::irls_svd};
    SolverConfig solver{};
};

/// The instance seen by trial `trial` at settings[setting]; every method shares it.
PlantedInstance noise_sweep_instance(const RecoverySweepConfig& config, std::size_t setting,
                                     int trial);
PlantedInstance outlier_sweep_instance(const RecoverySweepConfig& config, std::size_t setting,
                                       int trial);

/// Additive-noise recovery. All methods see the same instance within a trial.
std::vector<TrialRow> run_noise_sweep(const RecoverySweepConfig& config, int threads = 1);

/// Outlier recovery; LRSE is measured on inlier columns only.
std::vector<TrialRow> run_outlier_sweep(const RecoverySweepConfig& config, int threads = 1);

/// Mean of a column over the rows of one (method, setting) pair.
double mean_of(const std::vector<TrialRow>& rows, RecoveryMethod method, double setting,
               double TrialRow::*field);

struct ClusterRun {
    double mean_snr = 0.0;
    DistanceMatrix fd;
    DistanceMatrix svd;
    DistanceMatrix euclidean;
    std::vector<int> labels;

    double silhouette(const DistanceMatrix& d) const { return silhouette_score(d, labels); }
};

/// Cluster simulation: FD and SVD flag-chordal distance matrices against the flattened
/// Euclidean baseline.
ClusterRun run_cluster_experiment(const ClusterSimConfig& config, int threads = 1);

struct KnnRow {
    int trial = 0;
    std::string method;
    Index k = 0;
    double accuracy = 0.0;
};

/// kNN accuracy for every k in [k_min, k_max] over seeded stratified splits. Split t is
/// the same for every caller using the same seed, so methods are paired.
std::vector<KnnRow> knn_sweep(const DistanceMatrix& dist, const std::vector<int>& labels,
                              Index k_min, Index k_max, int trials, double train_fraction,
                              std::uint64_t seed, const std::string& method);

struct PatchKnnConfig {
    PatchSimConfig sim{};
    std::vector<RecoveryMethod> methods{RecoveryMethod::fd, RecoveryMethod::svd};
    DistanceMetric metric = DistanceMetric::grassmann_product_sum;
    Index k_min = 6;
    Index k_max = 24;
    int trials = 20;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

std::vector<KnnRow> run_patch_knn(const PatchKnnConfig& config, int threads = 1);

/// Mean accuracy per (method, k).
std::map<std::pair<std::string, Index>, double> mean_knn_accuracy(const std::vector<KnnRow>& rows);

}  // namespace flagdecomp

#endif
