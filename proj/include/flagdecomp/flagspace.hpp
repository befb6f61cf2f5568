#ifndef FLAGDECOMP_FLAGSPACE_HPP
#define FLAGDECOMP_FLAGSPACE_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "flagdecomp/linalg.hpp"
#include "flagdecomp/random.hpp"

namespace flagdecomp {

/// Signature (n₁, …, n_k; n) with 0 < n₁ < … < n_k ≤ n.
class FlagType {
public:
    FlagType(std::vector<Index> signature, Index ambient);

    /// Parses "2,4" (ambient dimension supplied separately).
    static FlagType parse(const std::string& text, Index ambient);

    const std::vector<Index>& signature() const noexcept { return signature_; }
    Index ambient() const noexcept { return ambient_; }
    std::size_t level_count() const noexcept { return signature_.size(); }
    /// n_k, the column count of Stiefel coordinates.
    Index top() const noexcept { return signature_.back(); }
    /// mᵢ = nᵢ − nᵢ₋₁.
    Index width(std::size_t i) const;
    std::vector<Index> widths() const;
    /// nᵢ₋₁, the first coordinate column of block i.
    Index offset(std::size_t i) const { return i == 0 ? 0 : signature_.at(i - 1); }

    std::string to_string() const;

    friend bool operator==(const FlagType&, const FlagType&) = default;

private:
    std::vector<Index> signature_;
    Index ambient_;
};

/// Stiefel coordinates X = [X₁ | … | X_k] of a flag: orthonormal columns, block i spans
/// the i-th increment of the flag.
template <typename Scalar>
class StiefelFlag {
public:
    StiefelFlag(Mat<Scalar> coordinates, FlagType type)
        : coordinates_(std::move(coordinates)), type_(std::move(type)) {
        if (coordinates_.rows() != type_.ambient() || coordinates_.cols() != type_.top()) {
            throw InvalidArgument("StiefelFlag: coordinates are " +
                                  std::to_string(coordinates_.rows()) + "x" +
                                  std::to_string(coordinates_.cols()) + ", flag type " +
                                  type_.to_string() + " needs " +
                                  std::to_string(type_.ambient()) + "x" +
                                  std::to_string(type_.top()));
        }
        if (!is_orthonormal(coordinates_)) {
            throw InvalidArgument("StiefelFlag: coordinates are not orthonormal");
        }
    }

    const Mat<Scalar>& coordinates() const noexcept { return coordinates_; }
    const FlagType& type() const noexcept { return type_; }
    std::size_t block_count() const noexcept { return type_.level_count(); }

    auto block(std::size_t i) const {
        return coordinates_.middleCols(type_.offset(i), type_.width(i));
    }
    /// [X₁ | … | Xᵢ], spanning the i-th subspace of the flag.
    auto leading(std::size_t i) const { return coordinates_.leftCols(type_.signature().at(i)); }

private:
    Mat<Scalar> coordinates_;
    FlagType type_;
};

using Flag = StiefelFlag<double>;

namespace detail {

template <typename Scalar>
void require_same_type(const StiefelFlag<Scalar>& x, const StiefelFlag<Scalar>& y,
                       const char* who) {
    if (!(x.type() == y.type())) {
        throw InvalidArgument(std::string(who) + ": flag types differ (" + x.type().to_string() +
                              " vs " + y.type().to_string() + ")");
    }
}

/// sqrt(max(0, v)); v is analytically nonnegative but may dip below zero by round-off.
template <typename Scalar>
Scalar clamped_sqrt(Scalar v) {
    return std::sqrt(v > Scalar(0) ? v : Scalar(0));
}

/// m − ‖XᵀY‖_F² for orthonormal X, Y of equal width, evaluated as ‖Y − X(XᵀY)‖_F² so that
/// nearby subspaces do not lose precision to cancellation.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar squared_sine_sum(const Eigen::MatrixBase<DerivedX>& x,
                                           const Eigen::MatrixBase<DerivedY>& y) {
    using Scalar = typename DerivedX::Scalar;
    const Mat<Scalar> coeffs = x.transpose() * y;
    return (y - x * coeffs).squaredNorm();
}

}  // namespace detail

/// Chordal distance between equal-dimension subspaces, (1/√2)‖XXᵀ − YYᵀ‖_F
/// = sqrt(m − ‖XᵀY‖_F²).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar grassmann_chordal(const Eigen::MatrixBase<DerivedX>& x,
                                            const Eigen::MatrixBase<DerivedY>& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw InvalidArgument("grassmann_chordal: shape mismatch");
    }
    return detail::clamped_sqrt(detail::squared_sine_sum(x, y));
}

/// ‖X − Y‖_F on raw coordinates.
template <typename Scalar>
Scalar stiefel_chordal(const StiefelFlag<Scalar>& x, const StiefelFlag<Scalar>& y) {
    if (x.coordinates().rows() != y.coordinates().rows() ||
        x.coordinates().cols() != y.coordinates().cols()) {
        throw InvalidArgument("stiefel_chordal: shape mismatch");
    }
    return (x.coordinates() - y.coordinates()).norm();
}

/// Flag chordal distance sqrt(½ Σᵢ ‖XᵢXᵢᵀ − YᵢYᵢᵀ‖_F²) = sqrt(Σᵢ mᵢ − tr(XᵢᵀYᵢYᵢᵀXᵢ)),
/// computed blockwise without forming n × n projectors.
template <typename Scalar>
Scalar flag_chordal(const StiefelFlag<Scalar>& x, const StiefelFlag<Scalar>& y) {
    detail::require_same_type(x, y, "flag_chordal");
    Scalar total(0);
    for (std::size_t i = 0; i < x.block_count(); ++i) {
        total += detail::squared_sine_sum(x.block(i), y.block(i));
    }
    return detail::clamped_sqrt(total);
}

/// Per-block Grassmann chordal distances, one entry per flag block.
template <typename Scalar>
Vec<Scalar> block_grassmann_distances(const StiefelFlag<Scalar>& x, const StiefelFlag<Scalar>& y) {
    detail::require_same_type(x, y, "block_grassmann_distances");
    Vec<Scalar> out(static_cast<Index>(x.block_count()));
    for (std::size_t i = 0; i < x.block_count(); ++i) {
        out(static_cast<Index>(i)) = grassmann_chordal(x.block(i), y.block(i));
    }
    return out;
}

/// Σᵢ (1/√2)‖XᵢXᵢᵀ − YᵢYᵢᵀ‖_F, the ℓ₁ distance on Gr(m₁,n) × … × Gr(m_k,n).
template <typename Scalar>
Scalar grassmann_product_sum(const StiefelFlag<Scalar>& x, const StiefelFlag<Scalar>& y) {
    detail::require_same_type(x, y, "grassmann_product_sum");
    return block_grassmann_distances(x, y).sum();
}

/// Seeded random flag: orthonormalized Gaussian coordinates.
template <typename Scalar = double>
StiefelFlag<Scalar> random_stiefel_flag(const FlagType& type, std::uint64_t seed) {
    Rng rng(seed);
    return StiefelFlag<Scalar>(random_orthonormal<Scalar>(type.ambient(), type.top(), rng), type);
}

/// Partition the first n_k columns of an orthonormal basis into a flag of the given type.
template <typename Derived>
StiefelFlag<typename Derived::Scalar> flag_from_basis(const Eigen::MatrixBase<Derived>& basis,
                                                      const FlagType& type) {
    if (basis.cols() < type.top()) {
        throw InvalidArgument("flag_from_basis: basis has fewer than n_k columns");
    }
    return StiefelFlag<typename Derived::Scalar>(basis.leftCols(type.top()), type);
}

}  // namespace flagdecomp

#endif
