#ifndef FLAGDECOMP_METRICS_HPP
#define FLAGDECOMP_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include "flagdecomp/flagspace.hpp"

namespace flagdecomp {

enum class MetricKind { snr_db, lrse_db, chordal };

/// A scalar score. dB kinds may be ±infinity (IEEE); chordal is always ≥ 0.
struct MetricValue {
    double value = 0.0;
    MetricKind kind = MetricKind::chordal;

    operator double() const noexcept { return value; }
};

namespace detail {

inline double decibel_ratio(double numerator, double denominator) {
    if (numerator == 0.0 && denominator == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (denominator == 0.0) return std::numeric_limits<double>::infinity();
    if (numerator == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(numerator / denominator);
}

}  // namespace detail

/// 10·log₁₀(‖D‖_F² / ‖ε‖_F²).
template <typename DerivedA, typename DerivedB>
MetricValue snr_db(const Eigen::MatrixBase<DerivedA>& signal,
                   const Eigen::MatrixBase<DerivedB>& noise) {
    if (signal.rows() != noise.rows() || signal.cols() != noise.cols()) {
        throw InvalidArgument("snr_db: shape mismatch");
    }
    const double s = static_cast<double>(signal.squaredNorm());
    const double e = static_cast<double>(noise.squaredNorm());
    if (s == 0.0 && e == 0.0) {
        throw InvalidArgument("snr_db: both signal and noise are zero");
    }
    return {detail::decibel_ratio(s, e), MetricKind::snr_db};
}

/// 10·log₁₀(‖D − D̂‖_F² / ‖D‖_F²).
template <typename DerivedA, typename DerivedB>
MetricValue lrse_db(const Eigen::MatrixBase<DerivedA>& truth,
                    const Eigen::MatrixBase<DerivedB>& estimate) {
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
        throw InvalidArgument("lrse_db: shape mismatch");
    }
    const double denom = static_cast<double>(truth.squaredNorm());
    if (denom == 0.0) {
        throw InvalidArgument("lrse_db: reference matrix has zero norm");
    }
    const double num = static_cast<double>((truth - estimate).squaredNorm());
    return {detail::decibel_ratio(num, denom), MetricKind::lrse_db};
}

/// sqrt(Σᵢ mᵢ − tr(XᵢᵀX̂ᵢX̂ᵢᵀXᵢ)), the flag chordal distance between truth and estimate.
/// Each trace deficit is accumulated as ‖Xᵢ − X̂ᵢX̂ᵢᵀXᵢ‖_F², which equals it exactly for
/// orthonormal blocks and stays accurate when the estimate is close to the truth.
template <typename Scalar>
MetricValue flag_recovery_distance(const StiefelFlag<Scalar>& truth,
                                   const StiefelFlag<Scalar>& estimate) {
    if (!(truth.type() == estimate.type())) {
        throw InvalidArgument("flag_recovery_distance: flag types differ");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < truth.block_count(); ++i) {
        total += static_cast<double>(detail::squared_sine_sum(estimate.block(i), truth.block(i)));
    }
    return {std::sqrt(std::max(total, 0.0)), MetricKind::chordal};
}

}  // namespace flagdecomp

#endif
