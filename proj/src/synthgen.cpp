#include "flagdecomp/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flagdecomp {

std::string to_string(NoiseDistribution dist) {
    switch (dist) {
        case NoiseDistribution::gaussian: return "gaussian";
        case NoiseDistribution::exponential: return "exponential";
        case NoiseDistribution::uniform: return "uniform";
    }
    return "?";
}

NoiseDistribution parse_noise_distribution(const std::string& text) {
    if (text == "gaussian" || text == "normal") return NoiseDistribution::gaussian;
    if (text == "exponential") return NoiseDistribution::exponential;
    if (text == "uniform") return NoiseDistribution::uniform;
    throw InvalidArgument("unknown noise distribution '" + text + "'");
}

MatrixXd sample_noise(Index rows, Index cols, NoiseDistribution dist, double scale, Rng& rng) {
    if (scale < 0.0 || !std::isfinite(scale)) {
        throw InvalidArgument("noise scale must be finite and nonnegative");
    }
    if (scale == 0.0) {
        return MatrixXd::Zero(rows, cols);
    }
    MatrixXd out(rows, cols);
    switch (dist) {
        case NoiseDistribution::gaussian:
            return gaussian_matrix(rows, cols, rng, scale);
        case NoiseDistribution::exponential: {
            std::exponential_distribution<double> e(1.0 / scale);
            for (Index j = 0; j < cols; ++j)
                for (Index i = 0; i < rows; ++i) out(i, j) = e(rng) - scale;
            return out;
        }
        case NoiseDistribution::uniform: {
            const double a = scale * std::sqrt(3.0);
            std::uniform_real_distribution<double> u(-a, a);
            for (Index j = 0; j < cols; ++j)
                for (Index i = 0; i < rows; ++i) out(i, j) = u(rng);
            return out;
        }
    }
    return out;
}

std::vector<Index> PlantedInstance::inliers() const {
    std::vector<Index> out;
    std::size_t next = 0;
    for (Index j = 0; j < clean.cols(); ++j) {
        if (next < outliers.size() && outliers[next] == j) {
            ++next;
        } else {
            out.push_back(j);
        }
    }
    return out;
}

ColumnHierarchy prefix_hierarchy(const std::vector<Index>& block_sizes) {
    std::vector<Index> cutoffs;
    Index total = 0;
    for (const Index b : block_sizes) {
        if (b < 1) throw InvalidArgument("prefix_hierarchy: block sizes must be positive");
        total += b;
        cutoffs.push_back(total);
    }
    return band_hierarchy(cutoffs, total);
}

namespace {

void check_model(const FlagType& type, const std::vector<Index>& block_sizes) {
    if (block_sizes.size() != type.level_count()) {
        throw InvalidArgument("synthetic model: need one block size per flag level");
    }
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        if (block_sizes[i] < type.width(i)) {
            throw InvalidArgument("synthetic model: block " + std::to_string(i) +
                                  " is smaller than its flag increment");
        }
    }
}

}  // namespace

MatrixXd planted_data(const Flag& truth, const std::vector<Index>& block_sizes, Rng& rng) {
    check_model(truth.type(), block_sizes);
    const Index p = std::accumulate(block_sizes.begin(), block_sizes.end(), Index{0});
    MatrixXd d(truth.type().ambient(), p);
    Index col = 0;
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        const auto basis = truth.leading(i);
        const MatrixXd coeffs = gaussian_matrix(basis.cols(), block_sizes[i], rng);
        d.middleCols(col, block_sizes[i]) = basis * coeffs;
        col += block_sizes[i];
    }
    return d;
}

PlantedInstance gen_noise_instance(const FlagType& type, const std::vector<Index>& block_sizes,
                                   const NoiseSpec& noise) {
    check_model(type, block_sizes);
    Flag truth = random_stiefel_flag(type, derive_seed(noise.seed, 0));
    Rng data_rng(derive_seed(noise.seed, 1));
    MatrixXd clean = planted_data(truth, block_sizes, data_rng);
    Rng noise_rng(derive_seed(noise.seed, 2));
    MatrixXd observed =
        clean + sample_noise(clean.rows(), clean.cols(), noise.distribution, noise.scale, noise_rng);
    return PlantedInstance{std::move(truth), std::move(clean), std::move(observed),
                           prefix_hierarchy(block_sizes), {}};
}

PlantedInstance gen_outlier_instance(const FlagType& type, const std::vector<Index>& block_sizes,
                                     Index outlier_count, std::uint64_t seed) {
    check_model(type, block_sizes);
    const Index p = std::accumulate(block_sizes.begin(), block_sizes.end(), Index{0});
    if (outlier_count < 0 || outlier_count >= p) {
        throw InvalidArgument("gen_outlier_instance: outlier count must be in [0, columns)");
    }
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        if (block_sizes[i] - outlier_count < type.width(i)) {
            throw InvalidArgument("gen_outlier_instance: " + std::to_string(outlier_count) +
                                  " outliers could leave block " + std::to_string(i) +
                                  " with fewer than " + std::to_string(type.width(i)) +
                                  " inliers");
        }
    }

    Flag truth = random_stiefel_flag(type, derive_seed(seed, 0));
    Rng data_rng(derive_seed(seed, 1));
    MatrixXd clean = planted_data(truth, block_sizes, data_rng);

    Rng pick_rng(derive_seed(seed, 2));
    std::vector<Index> columns(static_cast<std::size_t>(p));
    std::iota(columns.begin(), columns.end(), Index{0});
    std::shuffle(columns.begin(), columns.end(), pick_rng);
    std::vector<Index> outliers(columns.begin(), columns.begin() + outlier_count);
    std::sort(outliers.begin(), outliers.end());

    MatrixXd observed = clean;
    if (!outliers.empty()) {
        Rng outlier_rng(derive_seed(seed, 3));
        const MatrixXd raw = gaussian_matrix(clean.rows(), outlier_count, outlier_rng);
        const auto& x = truth.coordinates();
        const MatrixXd orthogonal = raw - x * (x.transpose() * raw);
        observed(Eigen::all, outliers) = orthogonal;
    }
    return PlantedInstance{std::move(truth), std::move(clean), std::move(observed),
                           prefix_hierarchy(block_sizes), std::move(outliers)};
}

ClusterSim gen_cluster_sim(const ClusterSimConfig& config) {
    if (config.centers < 1 || config.per_cluster < 1 || config.noise_sigma < 0.0) {
        throw InvalidArgument("gen_cluster_sim: parameters must be positive");
    }
    const FlagType type(config.signature, config.ambient);
    check_model(type, config.block_sizes);
    const ColumnHierarchy hierarchy = prefix_hierarchy(config.block_sizes);

    ClusterSim sim;
    for (Index c = 0; c < config.centers; ++c) {
        sim.centers.push_back(
            random_stiefel_flag(type, derive_seed(config.seed, static_cast<std::uint64_t>(c))));
    }
    const std::uint64_t item_stream = derive_seed(config.seed, 0xC1A55ULL);
    for (Index c = 0; c < config.centers; ++c) {
        for (Index i = 0; i < config.per_cluster; ++i) {
            const auto index = static_cast<std::uint64_t>(c * config.per_cluster + i);
            Rng rng(derive_seed(item_stream, index));
            const Flag& center = sim.centers[static_cast<std::size_t>(c)];
            MatrixXd clean = planted_data(center, config.block_sizes, rng);
            MatrixXd observed = clean + sample_noise(clean.rows(), clean.cols(),
                                                     NoiseDistribution::gaussian,
                                                     config.noise_sigma, rng);
            sim.instances.push_back(
                PlantedInstance{center, std::move(clean), std::move(observed), hierarchy, {}});
            sim.labels.push_back(static_cast<int>(c));
        }
    }
    return sim;
}

namespace {

MatrixXd orthonormal_columns(const MatrixXd& m) {
    Eigen::HouseholderQR<MatrixXd> qr(m);
    return qr.householderQ() * MatrixXd::Identity(m.rows(), m.cols());
}

}  // namespace

PatchSim gen_patch_collection(const PatchSimConfig& config) {
    if (config.class_sizes.empty() || config.patch_side < 3 || config.patch_side % 2 == 0) {
        throw InvalidArgument("gen_patch_collection: need classes and an odd patch side >= 3");
    }
    const FlagType type(config.signature, config.bands);
    if (type.level_count() != 2) {
        throw InvalidArgument("gen_patch_collection: patch flags have two levels");
    }
    const Index pixels = config.patch_side * config.patch_side;
    if (type.width(0) > 1 || type.width(1) > pixels - 1) {
        throw InvalidArgument("gen_patch_collection: flag type too large for the patch");
    }
    const ColumnHierarchy hierarchy = neighborhood_hierarchy({1, config.patch_side});
    const Index center = hierarchy.level(0).front();

    Rng base_rng(derive_seed(config.seed, 0));
    const MatrixXd base = random_orthonormal(config.bands, type.top(), base_rng);

    PatchSim sim{{}, {}, hierarchy, {}};
    for (std::size_t c = 0; c < config.class_sizes.size(); ++c) {
        Rng rng(derive_seed(config.seed, 1 + c));
        const MatrixXd spread = gaussian_matrix(config.bands, type.top(), rng, config.class_spread);
        sim.class_flags.emplace_back(orthonormal_columns(base + spread), type);
    }

    const std::uint64_t item_stream = derive_seed(config.seed, 0xBA7C4ULL);
    std::uint64_t item = 0;
    for (std::size_t c = 0; c < config.class_sizes.size(); ++c) {
        const MatrixXd& x = sim.class_flags[c].coordinates();
        for (Index i = 0; i < config.class_sizes[c]; ++i, ++item) {
            Rng rng(derive_seed(item_stream, item));
            const MatrixXd jitter = gaussian_matrix(config.bands, type.top(), rng, config.patch_jitter);
            const MatrixXd local = orthonormal_columns(x + jitter);
            MatrixXd patch(config.bands, pixels);
            for (Index j = 0; j < pixels; ++j) {
                if (j == center) {
                    // Same expected energy as the surrounding pixels.
                    const double gain = std::sqrt(static_cast<double>(type.top()) /
                                                  static_cast<double>(type.signature()[0]));
                    patch.col(j) = gain * local.leftCols(type.signature()[0]) *
                                   gaussian_matrix(type.signature()[0], 1, rng);
                } else {
                    patch.col(j) = local * gaussian_matrix(type.top(), 1, rng);
                }
            }
            patch += sample_noise(config.bands, pixels, NoiseDistribution::gaussian,
                                  config.noise_sigma, rng);
            sim.patches.push_back(std::move(patch));
            sim.labels.push_back(static_cast<int>(c));
        }
    }
    return sim;
}

}  // namespace flagdecomp
