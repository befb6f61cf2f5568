#include <gtest/gtest.h>

#include <limits>

#include "flagdecomp/linalg.hpp"
#include "flagdecomp/random.hpp"
#include "support/oracles.hpp"

using namespace flagdecomp;

TEST(Svd, IdentityHasUnitSingularValues) {
    const auto r = svd(MatrixXd::Identity(3, 3));
    EXPECT_TRUE(r.singular_values.isApprox(VectorXd::Ones(3)));
    EXPECT_NEAR((r.left_vectors.cwiseAbs() - MatrixXd::Identity(3, 3)).norm(), 0.0, 1e-14);
    EXPECT_NEAR((r.right_vectors.cwiseAbs() - MatrixXd::Identity(3, 3)).norm(), 0.0, 1e-14);
}

TEST(Svd, PaddedDiagonal) {
    MatrixXd a = MatrixXd::Zero(3, 2);
    a(0, 0) = 3.0;
    a(1, 1) = 2.0;
    const auto r = svd(a);
    ASSERT_EQ(r.singular_values.size(), 2);
    EXPECT_DOUBLE_EQ(r.singular_values(0), 3.0);
    EXPECT_DOUBLE_EQ(r.singular_values(1), 2.0);
    EXPECT_EQ(r.left_vectors.rows(), 3);
    EXPECT_EQ(r.left_vectors.cols(), 2);
}

TEST(Svd, RandomReconstructionResidual) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MatrixXd a = oracle::gaussian(10, 4, seed);
        const auto r = svd(a);
        const MatrixXd back = r.left_vectors * r.singular_values.asDiagonal() * r.right_vectors.transpose();
        EXPECT_LT((a - back).norm(), 1e-10 * std::max(1.0, a.norm()));
        EXPECT_LT((r.left_vectors.transpose() * r.left_vectors - MatrixXd::Identity(4, 4)).norm(), 1e-10);
        for (Index i = 1; i < r.singular_values.size(); ++i) {
            EXPECT_GE(r.singular_values(i - 1), r.singular_values(i));
        }
        EXPECT_GE(r.singular_values.minCoeff(), 0.0);
    }
}

TEST(Svd, WideMatrixIsThin) {
    const auto r = svd(oracle::gaussian(3, 7, 1));
    EXPECT_EQ(r.left_vectors.cols(), 3);
    EXPECT_EQ(r.right_vectors.rows(), 7);
    EXPECT_EQ(r.right_vectors.cols(), 3);
}

TEST(Svd, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(svd(MatrixXd(0, 3)), InvalidArgument);
    MatrixXd a = MatrixXd::Ones(2, 2);
    a(1, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(svd(a), InvalidArgument);
    a(1, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(svd(a), InvalidArgument);
}

TEST(NumericalRank, TinyValueBelowThreshold) {
    VectorXd s(3);
    s << 3.0, 2.0, 1e-18;
    EXPECT_EQ(numerical_rank(s, 10, 3), 2);
}

TEST(NumericalRank, ZeroMatrix) {
    EXPECT_EQ(numerical_rank(VectorXd::Zero(2), 5, 2), 0);
    EXPECT_EQ(numerical_rank(MatrixXd::Zero(4, 3)), 0);
}

TEST(NumericalRank, ProductOfGaussians) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const MatrixXd a = oracle::gaussian(10, 3, seed) * oracle::gaussian(3, 4, seed + 100);
        EXPECT_EQ(numerical_rank(svd(a).singular_values, 10, 4), 3);
        EXPECT_EQ(numerical_rank(a), oracle::rank(a));
    }
}

TEST(ProjectorComplement, BasisVector) {
    const MatrixXd e1 = MatrixXd::Identity(3, 1);
    const MatrixXd p = projector_complement(e1);
    VectorXd d(3);
    d << 0, 1, 1;
    EXPECT_NEAR((p - MatrixXd(d.asDiagonal())).norm(), 0.0, 1e-15);
}

TEST(ProjectorComplement, FullSpanIsZero) {
    EXPECT_NEAR(projector_complement(MatrixXd::Identity(3, 3)).norm(), 0.0, 1e-15);
}

TEST(ProjectorComplement, RandomStiefelProperties) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const MatrixXd q = oracle::stiefel(5, 2, seed);
        const MatrixXd p = projector_complement(q);
        EXPECT_LT((p - p.transpose()).norm(), 1e-12);
        EXPECT_LT((p * p - p).norm(), 1e-10);
        EXPECT_LT((p * q).norm(), 1e-12);
        EXPECT_NEAR(p.trace(), 3.0, 1e-12);
        EXPECT_LT((p - (MatrixXd::Identity(5, 5) - oracle::projector(q))).norm(), 1e-14);
    }
}

TEST(ProjectorComplement, RejectsNonOrthonormal) {
    EXPECT_THROW(projector_complement(MatrixXd::Ones(3, 2)), InvalidArgument);
}

TEST(Orthonormality, ErrorAndBasis) {
    const MatrixXd q = oracle::stiefel(6, 3, 4);
    EXPECT_LT(orthonormality_error(q), 1e-14);
    EXPECT_TRUE(is_orthonormal(q));
    EXPECT_FALSE(is_orthonormal(MatrixXd(2.0 * q)));

    const MatrixXd a = oracle::gaussian(6, 2, 9) * oracle::gaussian(2, 5, 10);
    const MatrixXd b = orthonormal_basis(a);
    EXPECT_EQ(b.cols(), 2);
    EXPECT_LT((projector(b) - oracle::span_projector(a)).norm(), 1e-10);
}

TEST(Random, SplitmixAndDeriveSeedAreDeterministic) {
    EXPECT_EQ(splitmix64(0), splitmix64(0));
    EXPECT_NE(splitmix64(0), splitmix64(1));
    EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
    EXPECT_NE(derive_seed(5, 3), derive_seed(5, 4));
    EXPECT_NE(derive_seed(5, 3), derive_seed(6, 3));
    // Known splitmix64 output for input 0.
    EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Random, GaussianMatrixMomentsAndDeterminism) {
    Rng a(11);
    Rng b(11);
    const MatrixXd x = gaussian_matrix(200, 50, a);
    const MatrixXd y = gaussian_matrix(200, 50, b);
    EXPECT_EQ(x, y);
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(1e4));
    EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Random, RandomOrthonormal) {
    Rng rng(3);
    const MatrixXd q = random_orthonormal(10, 4, rng);
    EXPECT_LT((q.transpose() * q - MatrixXd::Identity(4, 4)).norm(), 1e-12);
}
