#ifndef FLAGDECOMP_SYNTHGEN_HPP
#define FLAGDECOMP_SYNTHGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "flagdecomp/flagspace.hpp"
#include "flagdecomp/hierarchy.hpp"

namespace flagdecomp {

enum class NoiseDistribution { gaussian, exponential, uniform };
std::string to_string(NoiseDistribution dist);
NoiseDistribution parse_noise_distribution(const std::string& text);

/// Zero-mean additive noise with standard deviation `scale`. Exponential samples are
/// shifted by their mean; uniform samples live on [−√3·scale, √3·scale].
struct NoiseSpec {
    NoiseDistribution distribution = NoiseDistribution::gaussian;
    double scale = 0.0;
    std::uint64_t seed = 0;
};

MatrixXd sample_noise(Index rows, Index cols, NoiseDistribution dist, double scale, Rng& rng);

/// A planted flag, the noise-free data it explains, and a corrupted observation.
struct PlantedInstance {
    Flag truth;
    /// Noise-free model; for outlier instances the outlier positions hold the value the
    /// inlier model would have produced.
    MatrixXd clean;
    MatrixXd observed;
    ColumnHierarchy hierarchy;
    std::vector<Index> outliers;  // ascending

    std::vector<Index> inliers() const;
};

/// Prefix hierarchy whose i-th difference set has block_sizes[i] columns.
ColumnHierarchy prefix_hierarchy(const std::vector<Index>& block_sizes);

/// Columns of block i are X_{1..i}·s with s ~ N(0, I); blocks are contiguous.
MatrixXd planted_data(const Flag& truth, const std::vector<Index>& block_sizes, Rng& rng);

/// Additive-noise model: D as in planted_data, observed D̃ = D + ε.
PlantedInstance gen_noise_instance(const FlagType& type, const std::vector<Index>& block_sizes,
                                   const NoiseSpec& noise);

/// Outlier model: `outlier_count` columns (uniform over all blocks) replaced by
/// (I − XXᵀ)o with o ~ N(0, I).
PlantedInstance gen_outlier_instance(const FlagType& type, const std::vector<Index>& block_sizes,
                                     Index outlier_count, std::uint64_t seed);

struct ClusterSimConfig {
    Index centers = 3;
    Index per_cluster = 20;
    double noise_sigma = 0.95;
    std::vector<Index> signature{2, 4};
    Index ambient = 10;
    std::vector<Index> block_sizes{20, 20};
    std::uint64_t seed = 0;
};

struct ClusterSim {
    std::vector<Flag> centers;
    std::vector<PlantedInstance> instances;
    std::vector<int> labels;
};

/// Noisy matrices generated around a few planted center flags; instance i belongs to
/// cluster i / per_cluster.
ClusterSim gen_cluster_sim(const ClusterSimConfig& config);

/// Synthetic hyperspectral-style patches: bands × pixels matrices whose center pixel
/// follows the first block of a class flag and whose other pixels span the whole flag.
struct PatchSimConfig {
    std::vector<Index> class_sizes{90, 70, 60, 45, 35};
    Index bands = 20;
    std::vector<Index> signature{1, 8};
    Index patch_side = 3;
    /// Spread of class flags around a shared base flag.
    double class_spread = 0.2;
    /// Per-patch perturbation of the class flag.
    double patch_jitter = 0.2;
    double noise_sigma = 0.3;
    std::uint64_t seed = 0;
};

struct PatchSim {
    std::vector<MatrixXd> patches;
    std::vector<int> labels;
    ColumnHierarchy hierarchy;
    std::vector<Flag> class_flags;
};

PatchSim gen_patch_collection(const PatchSimConfig& config);

}  // namespace flagdecomp

#endif
