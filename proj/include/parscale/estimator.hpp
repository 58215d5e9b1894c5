#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "parscale/scaling_laws.hpp"
#include "parscale/types.hpp"

namespace parscale {

// Turns measured series into effective-alpha estimates, diagnoses whether
// the sequential fraction stays constant as N grows, and back-projects an
// efficiency series to N = 1 to expose benchmark artifacts.

enum class EstimateSource { FromSpeedup, FromEfficiency };

/// Effective parallel portion derived from a single measurement.
struct AlphaEstimate {
    std::string label;
    std::uint64_t n = 1;
    double alpha_eff = 0.0;        ///< NaN when the inversion is singular
    double one_minus_alpha = 0.0;  ///< sequential fraction, NaN when singular
    EstimateSource source = EstimateSource::FromEfficiency;
    bool out_of_model = false;  ///< singular (n == 1) or outside [0, 1]

    bool valid() const { return !out_of_model; }
};

enum class Trend { Constant, Increasing, Decreasing };

/// Default thresholds; the CLI exposes both as flags.
inline constexpr double kDefaultSlopeThreshold = 0.25;
inline constexpr double kDefaultEfficiencyFloor = 0.95;

/// Constancy diagnosis of a (1 - alpha_eff) series.
struct SeriesDiagnostic {
    double mean_one_minus_alpha = 0.0;
    double relative_spread = 0.0;  ///< (max - min) / mean over valid points
    Trend trend = Trend::Constant;
    double trend_slope = 0.0;  ///< slope of ln(1-alpha) against ln N
    std::size_t points_used = 0;
    std::size_t excluded_out_of_model = 0;
    std::size_t excluded_zero = 0;  ///< 1-alpha == 0 points the log fit skips
};

/// Result of fitting E(N) = f / (N*(1-alpha) + alpha) to an efficiency
/// series. f below 1 means the N = 1 back-projection does not reach full
/// efficiency: part of the measured time was spent outside the payload,
/// the signature of benchmarks that fold access or setup costs in.
struct BackProjection {
    double efficiency_at_1 = 1.0;  ///< fitted f
    double foreign_fraction = 0.0;  ///< 1 - f
    double alpha_fit = 1.0;
    bool artifact_detected = false;
};

/// Convert measurements to per-point alpha estimates. Time-kind points need
/// an N = 1 baseline (mean of all N = 1 time points, consumed by the
/// conversion); its absence throws DataError. Speedup/efficiency points at
/// N = 1 cannot be inverted and come back flagged with NaN values instead.
std::vector<AlphaEstimate> estimate_series(std::span<const ScalingPoint> points);

/// Classify the trend of 1 - alpha_eff over N. Flagged estimates are
/// excluded (and counted); zero sequential fractions cannot enter the log
/// fit and are counted separately. Throws DataError when fewer than two
/// valid estimates remain or the fit is degenerate on a non-constant series.
SeriesDiagnostic diagnose_series(std::span<const AlphaEstimate> estimates,
                                 double slope_threshold = kDefaultSlopeThreshold);

/// Fit the efficiency-kind points of a series in log space, profiling f
/// analytically and searching alpha. Needs at least three distinct N.
/// The artifact flag is raised when f < efficiency_floor or the sequential
/// fraction of the same points is diagnosed as Decreasing.
BackProjection back_project(std::span<const ScalingPoint> points,
                            double efficiency_floor = kDefaultEfficiencyFloor,
                            double slope_threshold = kDefaultSlopeThreshold);

}  // namespace parscale
