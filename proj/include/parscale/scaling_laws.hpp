#pragma once

#include <cstdint>

#include "parscale/errors.hpp"

namespace parscale {

// Closed-form scaling laws. Everything here is pure and thread-safe.
// Throughout, alpha is the parallelizable fraction of the single-processor
// execution time, so (1 - alpha) is the part that stays sequential.

/// Strong-scaling speedup N / (N*(1-alpha) + alpha). Lies in [1, N].
/// alpha must be in [0, 1], n >= 1.
double amdahl_speedup(double alpha, std::uint64_t n);

/// Extended-precision overload. An alpha close to 1 carries the sequential
/// fraction in its last few bits, and the speedup magnifies that rounding by
/// a factor of N; taking the wider type preserves composition with
/// gustafson_to_amdahl to about 1 part in 1e13 even at N = 1e7.
double amdahl_speedup(long double alpha, std::uint64_t n);

/// Strong-scaling efficiency 1 / (N*(1-alpha) + alpha) = speedup / N.
double amdahl_efficiency(double alpha, std::uint64_t n);

/// Result of inverting a scaling law against a measurement. The inverse
/// formulas produce values outside [0, 1] for measurements the model cannot
/// explain (superlinear speedup, efficiency below 1/N); such readings are
/// flagged rather than clamped because the overshoot is itself a diagnostic.
struct AlphaReading {
    double value;       ///< effective parallel portion, unclamped
    bool out_of_model;  ///< true when value falls outside [0, 1]
};

/// Effective parallel portion implied by a measured speedup at n processors:
/// N/(N-1) * (S-1)/S. Throws SingularityError for n == 1.
AlphaReading alpha_from_speedup(double speedup, std::uint64_t n);

/// Effective parallel portion implied by a measured efficiency:
/// (E*N - 1) / (E*(N-1)). Throws SingularityError for n == 1.
AlphaReading alpha_from_efficiency(double efficiency, std::uint64_t n);

/// Weak-scaling (scaled-workload) speedup (1-alpha_g) + alpha_g * N.
double gustafson_speedup(double alpha_g, std::uint64_t n);

/// Weak-scaling efficiency alpha_g + (1-alpha_g)/N.
double gustafson_efficiency(double alpha_g, std::uint64_t n);

/// Map a weak-scaling alpha_g onto the strong-scaling alpha that yields the
/// same speedup at the same N: alpha_g*N / ((1-alpha_g) + alpha_g*N).
/// Returned in extended precision: rounding the result to double costs up to
/// N/2 units in the last place of the recomputed speedup, which would break
/// the equality amdahl_speedup(transform) == gustafson_speedup at large N.
long double gustafson_to_amdahl(double alpha_g, std::uint64_t n);

/// Payload performance delivered by n processors of single-processor
/// performance p_single: N * p_single / (N*(1-alpha) + alpha). For alpha < 1
/// this is bounded above by p_single / (1-alpha) no matter how large N gets.
double payload_performance(std::uint64_t n, double alpha, double p_single);

enum class LawKind { AmdahlFirstOrder, Gustafson, SecondOrder };

/// How the sequential fraction grows with N in the second-order law.
enum class OverheadGrowth { LinearInN, LogarithmicInN };

/// A parametrized scaling law. First order keeps alpha fixed; second order
/// erodes it as N grows, modelling per-processor organizational overhead.
struct ScalingModel {
    LawKind law = LawKind::AmdahlFirstOrder;
    double alpha0 = 1.0;  ///< parallel portion at N = 1
    double kappa = 0.0;   ///< overhead growth rate (second order only)
    OverheadGrowth growth = OverheadGrowth::LinearInN;

    static ScalingModel first_order(double alpha0);
    static ScalingModel gustafson(double alpha_g);
    static ScalingModel second_order(
        double alpha0, double kappa,
        OverheadGrowth growth = OverheadGrowth::LinearInN);
};

/// The alpha the model exhibits at n processors. First order: alpha0.
/// Second order: alpha0 - kappa*(N-1) or alpha0 - kappa*ln N, clamped to
/// [0, 1]. Gustafson: the equivalent strong-scaling alpha at N.
double effective_alpha_at(const ScalingModel& model, std::uint64_t n);

/// payload_performance evaluated at the model's effective alpha.
double model_payload_performance(const ScalingModel& model, std::uint64_t n,
                                 double p_single);

enum class PeakKind {
    Saturating,  ///< still climbing (or flat) at the end of the range
    Peaked       ///< a genuine interior maximum exists
};

struct PeakResult {
    std::uint64_t n_star;  ///< processor count of the maximum
    double p_star;         ///< payload performance there
    PeakKind kind;
};

/// Locate the payload-performance maximum over n in [1, n_max]. Laws whose
/// alpha never erodes (first order, weak scaling, second order with
/// kappa == 0) never lose performance as N grows, so they saturate at n_max
/// by construction. Eroding laws rise, possibly peak, then decay to a floor;
/// a geometric grid plus local refinement finds the same point a full
/// integer scan would, including the tie rule (smallest n wins). Reported as
/// Peaked only when the maximum strictly exceeds performance at n_max.
/// Requires n_max >= 2; n_max may be as large as 2^53.
PeakResult find_peak_performance(const ScalingModel& model, double p_single,
                                 std::uint64_t n_max);

}  // namespace parscale
