#include <gtest/gtest.h>

#include <numeric>

#include "flagdecomp/decompose.hpp"
#include "flagdecomp/metrics.hpp"
#include "flagdecomp/synthgen.hpp"
#include "support/oracles.hpp"

using namespace flagdecomp;

namespace {

const FlagType kType({2, 4}, 10);
const std::vector<Index> kBlocks{20, 20};

}  // namespace

TEST(NoiseInstance, Deterministic) {
    const NoiseSpec spec{NoiseDistribution::gaussian, 0.5, 42};
    const auto a = gen_noise_instance(kType, kBlocks, spec);
    const auto b = gen_noise_instance(kType, kBlocks, spec);
    EXPECT_EQ(a.observed, b.observed);
    EXPECT_EQ(a.truth.coordinates(), b.truth.coordinates());
    const auto c = gen_noise_instance(kType, kBlocks, {NoiseDistribution::gaussian, 0.5, 43});
    EXPECT_NE(a.observed, c.observed);
}

TEST(NoiseInstance, ZeroScaleIsExactAndNested) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = gen_noise_instance(kType, kBlocks, {NoiseDistribution::gaussian, 0.0, seed});
        EXPECT_EQ(inst.observed, inst.clean);
        EXPECT_EQ(inst.hierarchy, prefix_hierarchy(kBlocks));
        EXPECT_EQ(validate_hierarchy(inst.clean, inst.hierarchy), (std::vector<Index>{2, 4}));
        const auto fd = flag_bmgs(inst.observed, inst.hierarchy, kType);
        EXPECT_LT(flag_chordal(fd.flag, inst.truth), 1e-8);
        // First block only uses the leading two truth columns.
        const MatrixXd x1 = inst.truth.leading(0);
        const MatrixXd first = inst.clean.leftCols(20);
        EXPECT_LT((first - x1 * (x1.transpose() * first)).norm(), 1e-12);
    }
}

TEST(NoiseInstance, ExpectedSnr) {
    // E‖D‖² = 20·2 + 20·4 = 120 against E‖ε‖² = 400σ².
    double total = 0.0;
    const int runs = 400;
    for (int s = 0; s < runs; ++s) {
        const auto inst = gen_noise_instance(kType, kBlocks, {NoiseDistribution::gaussian, 0.95,
                                                              static_cast<std::uint64_t>(s)});
        total += snr_db(inst.clean, inst.observed - inst.clean);
    }
    EXPECT_NEAR(total / runs, 10.0 * std::log10(120.0 / (400.0 * 0.95 * 0.95)), 0.1);
}

TEST(SampleNoise, ZeroMeanAndUnitScale) {
    const double scale = 0.7;
    const Index rows = 200;
    const Index cols = 250;
    const double count = static_cast<double>(rows * cols);
    for (const auto dist : {NoiseDistribution::gaussian, NoiseDistribution::exponential,
                            NoiseDistribution::uniform}) {
        Rng rng(9);
        const MatrixXd e = sample_noise(rows, cols, dist, scale, rng);
        EXPECT_LT(std::abs(e.mean()), 4.0 * scale / std::sqrt(count)) << to_string(dist);
        const double var = (e.array() - e.mean()).square().sum() / (count - 1.0);
        EXPECT_NEAR(var, scale * scale, 0.03 * scale * scale) << to_string(dist);
    }
    Rng rng(1);
    EXPECT_EQ(sample_noise(3, 3, NoiseDistribution::uniform, 0.0, rng), MatrixXd::Zero(3, 3));
    EXPECT_THROW(sample_noise(3, 3, NoiseDistribution::gaussian, -1.0, rng), InvalidArgument);
    EXPECT_EQ(parse_noise_distribution("exponential"), NoiseDistribution::exponential);
    EXPECT_THROW(parse_noise_distribution("cauchy"), InvalidArgument);
}

TEST(SampleNoise, UniformSupport) {
    Rng rng(3);
    const MatrixXd e = sample_noise(50, 50, NoiseDistribution::uniform, 1.0, rng);
    EXPECT_LE(e.cwiseAbs().maxCoeff(), std::sqrt(3.0));
    Rng rng2(3);
    const MatrixXd x = sample_noise(50, 50, NoiseDistribution::exponential, 1.0, rng2);
    EXPECT_GE(x.minCoeff(), -1.0);
}

TEST(OutlierInstance, OutliersAreOrthogonalToTruth) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = gen_outlier_instance(kType, kBlocks, 8, seed);
        ASSERT_EQ(inst.outliers.size(), 8u);
        EXPECT_TRUE(std::is_sorted(inst.outliers.begin(), inst.outliers.end()));
        EXPECT_EQ(std::adjacent_find(inst.outliers.begin(), inst.outliers.end()), inst.outliers.end());
        const MatrixXd out = inst.observed(Eigen::all, inst.outliers);
        EXPECT_LT((inst.truth.coordinates().transpose() * out).norm(), 1e-10);
        EXPECT_GT(out.colwise().norm().minCoeff(), 0.0);
        const auto in = inst.inliers();
        EXPECT_EQ(in.size(), 32u);
        EXPECT_EQ(MatrixXd(inst.observed(Eigen::all, in)), MatrixXd(inst.clean(Eigen::all, in)));
    }
}

TEST(OutlierInstance, CountBounds) {
    EXPECT_EQ(gen_outlier_instance(kType, kBlocks, 0, 1).observed,
              gen_outlier_instance(kType, kBlocks, 0, 1).clean);
    EXPECT_NO_THROW(gen_outlier_instance(kType, kBlocks, 16, 1));
    // Three outliers could all land in the 4-column block, leaving 1 inlier for width 2.
    EXPECT_THROW(gen_outlier_instance(kType, {4, 20}, 3, 1), InvalidArgument);
    EXPECT_THROW(gen_outlier_instance(kType, kBlocks, -1, 1), InvalidArgument);
    EXPECT_THROW(gen_outlier_instance(kType, kBlocks, 40, 1), InvalidArgument);
}

TEST(PlantedModel, Errors) {
    EXPECT_THROW(gen_noise_instance(kType, {20}, {}), InvalidArgument);
    EXPECT_THROW(gen_noise_instance(kType, {1, 20}, {}), InvalidArgument);
    EXPECT_THROW(prefix_hierarchy({3, 0}), InvalidArgument);
}

TEST(ClusterSim, ShapesLabelsAndNoiseFreeClusters) {
    ClusterSimConfig cfg;
    cfg.noise_sigma = 0.0;
    cfg.per_cluster = 5;
    const auto sim = gen_cluster_sim(cfg);
    ASSERT_EQ(sim.instances.size(), 15u);
    ASSERT_EQ(sim.centers.size(), 3u);
    for (std::size_t i = 0; i < sim.instances.size(); ++i) {
        EXPECT_EQ(sim.labels[i], static_cast<int>(i / 5));
        EXPECT_EQ(sim.instances[i].observed.rows(), 10);
        EXPECT_EQ(sim.instances[i].observed.cols(), 40);
        const auto fd = flag_bmgs(sim.instances[i].observed, sim.instances[i].hierarchy, kType);
        EXPECT_LT(flag_chordal(fd.flag, sim.centers[i / 5]), 1e-8);
    }
    EXPECT_GT(flag_chordal(sim.centers[0], sim.centers[1]), 0.1);
    cfg.centers = 0;
    EXPECT_THROW(gen_cluster_sim(cfg), InvalidArgument);
}

TEST(ClusterSim, DefaultSnr) {
    double total = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        ClusterSimConfig cfg;
        cfg.seed = seed;
        for (const auto& inst : gen_cluster_sim(cfg).instances) {
            total += snr_db(inst.clean, inst.observed - inst.clean);
            ++count;
        }
    }
    EXPECT_NEAR(total / count, -4.78, 0.2);
}

TEST(PatchCollection, ShapesAndHierarchy) {
    PatchSimConfig cfg;
    cfg.class_sizes = {4, 3};
    const auto sim = gen_patch_collection(cfg);
    ASSERT_EQ(sim.patches.size(), 7u);
    EXPECT_EQ(sim.labels, (std::vector<int>{0, 0, 0, 0, 1, 1, 1}));
    EXPECT_EQ(sim.class_flags.size(), 2u);
    EXPECT_EQ(sim.hierarchy.level(0), (std::vector<Index>{4}));
    EXPECT_EQ(sim.hierarchy.width(), 9);
    for (const auto& p : sim.patches) {
        EXPECT_EQ(p.rows(), 20);
        EXPECT_EQ(p.cols(), 9);
    }
    const auto again = gen_patch_collection(cfg);
    EXPECT_EQ(again.patches[5], sim.patches[5]);
}

TEST(PatchCollection, NoiseFreePatchesFollowTheirFlag) {
    PatchSimConfig cfg;
    cfg.class_sizes = {3};
    cfg.noise_sigma = 0.0;
    cfg.patch_jitter = 0.0;
    const auto sim = gen_patch_collection(cfg);
    const MatrixXd x = sim.class_flags[0].coordinates();
    const MatrixXd x1 = sim.class_flags[0].leading(0);
    for (const auto& p : sim.patches) {
        EXPECT_LT((p - x * (x.transpose() * p)).norm(), 1e-10);
        const VectorXd c = p.col(4);
        EXPECT_LT((c - x1 * (x1.transpose() * c)).norm(), 1e-10);
    }
}

TEST(PatchCollection, Errors) {
    PatchSimConfig cfg;
    cfg.patch_side = 4;
    EXPECT_THROW(gen_patch_collection(cfg), InvalidArgument);
    cfg.patch_side = 3;
    cfg.signature = {2, 8};
    EXPECT_THROW(gen_patch_collection(cfg), InvalidArgument);
}
