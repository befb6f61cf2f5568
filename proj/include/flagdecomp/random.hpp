#ifndef FLAGDECOMP_RANDOM_HPP
#define FLAGDECOMP_RANDOM_HPP

#include <cstdint>
#include <random>

#include "flagdecomp/linalg.hpp"

namespace flagdecomp {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent sub-seed for stream `index` (trial, item, episode) of a run seeded with `seed`.
/// Streams never depend on how work is scheduled across threads.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) + index);
}

template <typename Scalar = double>
Mat<Scalar> gaussian_matrix(Index rows, Index cols, Rng& rng, Scalar stddev = Scalar(1)) {
    std::normal_distribution<Scalar> normal(Scalar(0), stddev);
    Mat<Scalar> out(rows, cols);
    // Column-major fill order is part of the determinism contract.
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            out(i, j) = normal(rng);
        }
    }
    return out;
}

/// Random orthonormal n × k matrix (thin Householder QR of a Gaussian matrix).
template <typename Scalar = double>
Mat<Scalar> random_orthonormal(Index n, Index k, Rng& rng) {
    if (k > n || k < 1) {
        throw InvalidArgument("random_orthonormal: need 1 <= k <= n");
    }
    const Mat<Scalar> g = gaussian_matrix<Scalar>(n, k, rng);
    Eigen::HouseholderQR<Mat<Scalar>> qr(g);
    return qr.householderQ() * Mat<Scalar>::Identity(n, k);
}

}  // namespace flagdecomp

#endif
