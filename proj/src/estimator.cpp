#include "parscale/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "parscale/errors.hpp"

namespace parscale {

namespace {

void check_point(const ScalingPoint& p) {
    if (p.n == 0) {
        throw Error("point '" + p.label + "': processor count must be >= 1");
    }
    if (!(p.value > 0.0) || !std::isfinite(p.value)) {
        throw Error("point '" + p.label + "' at N = " + std::to_string(p.n) +
                    ": value must be positive and finite");
    }
}

}  // namespace

std::vector<AlphaEstimate> estimate_series(
    std::span<const ScalingPoint> points) {
    bool has_time = false;
    double baseline_sum = 0.0;
    std::size_t baseline_count = 0;
    for (const auto& p : points) {
        check_point(p);
        if (p.kind != MeasurementKind::Time) continue;
        has_time = true;
        if (p.n == 1) {
            baseline_sum += p.value;
            ++baseline_count;
        }
    }
    if (has_time && baseline_count == 0) {
        throw DataError("time series needs an N = 1 baseline point");
    }
    const double baseline =
        baseline_count > 0 ? baseline_sum / static_cast<double>(baseline_count)
                           : 0.0;

    std::vector<AlphaEstimate> out;
    out.reserve(points.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : points) {
        if (p.kind == MeasurementKind::Time && p.n == 1) {
            continue;  // consumed by the baseline
        }
        const EstimateSource source = p.kind == MeasurementKind::Efficiency
                                          ? EstimateSource::FromEfficiency
                                          : EstimateSource::FromSpeedup;
        if (p.n == 1) {
            // The inversion divides by N - 1; keep the point, flag it.
            out.push_back({p.label, 1, nan, nan, source, true});
            continue;
        }
        AlphaReading reading{};
        switch (p.kind) {
            case MeasurementKind::Time:
                reading = alpha_from_speedup(baseline / p.value, p.n);
                break;
            case MeasurementKind::Speedup:
                reading = alpha_from_speedup(p.value, p.n);
                break;
            case MeasurementKind::Efficiency:
                reading = alpha_from_efficiency(p.value, p.n);
                break;
        }
        out.push_back({p.label, p.n, reading.value, 1.0 - reading.value,
                       source, reading.out_of_model});
    }
    return out;
}

SeriesDiagnostic diagnose_series(std::span<const AlphaEstimate> estimates,
                                 double slope_threshold) {
    if (!(slope_threshold > 0.0)) {
        throw Error("slope threshold must be positive");
    }

    SeriesDiagnostic d{};
    std::vector<double> seq;                       // valid 1-alpha values
    std::vector<std::pair<double, double>> fit;    // (ln N, ln(1-alpha))
    for (const auto& e : estimates) {
        if (e.out_of_model) {
            ++d.excluded_out_of_model;
            continue;
        }
        seq.push_back(e.one_minus_alpha);
        if (e.one_minus_alpha > 0.0) {
            fit.emplace_back(std::log(static_cast<double>(e.n)),
                             std::log(e.one_minus_alpha));
        } else {
            ++d.excluded_zero;
        }
    }
    if (seq.size() < 2) {
        throw DataError("diagnosis needs at least two valid estimates, got " +
                        std::to_string(seq.size()));
    }
    d.points_used = seq.size();

    const auto [min_it, max_it] = std::minmax_element(seq.begin(), seq.end());
    double mean = 0.0;
    for (double v : seq) mean += v;
    mean /= static_cast<double>(seq.size());
    d.mean_one_minus_alpha = mean;
    d.relative_spread = mean == 0.0 ? 0.0 : (*max_it - *min_it) / mean;

    // Least-squares slope of ln(1-alpha) against ln N. A series that is
    // exactly constant (including all-zero) needs no fit to be called flat.
    double slope = 0.0;
    bool fitted = false;
    if (fit.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (const auto& [x, y] : fit) {
            mx += x;
            my += y;
        }
        mx /= static_cast<double>(fit.size());
        my /= static_cast<double>(fit.size());
        double sxx = 0.0, sxy = 0.0;
        for (const auto& [x, y] : fit) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        if (sxx > 0.0) {
            slope = sxy / sxx;
            fitted = true;
        }
    }
    if (!fitted) {
        if (*min_it != *max_it) {
            throw DataError(
                "too few distinct processor counts for the trend fit");
        }
        slope = 0.0;
    }
    d.trend_slope = slope;
    if (std::abs(slope) < slope_threshold) {
        d.trend = Trend::Constant;
    } else {
        d.trend = slope > 0.0 ? Trend::Increasing : Trend::Decreasing;
    }
    return d;
}

namespace {

struct EfficiencySample {
    double n;
    double log_e;
};

// Fixed-f profile: with s = 1 - alpha the model is
//   ln E_i = ln f - ln(N_i * s + 1 - s),
// so the optimal ln f is the mean of ln E_i + ln(denominator), capped at
// ln(1.05) to keep f physically meaningful. Returns the residual sum of
// squares and the f it was achieved with.
std::pair<double, double> profile_residual(
    const std::vector<EfficiencySample>& data, double s) {
    const std::size_t m = data.size();
    std::vector<double> log_denom(m);
    double log_f = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        log_denom[i] = std::log(data[i].n * s + 1.0 - s);
        log_f += data[i].log_e + log_denom[i];
    }
    log_f /= static_cast<double>(m);
    log_f = std::min(log_f, std::log(1.05));
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = data[i].log_e + log_denom[i] - log_f;
        ssr += r * r;
    }
    return {ssr, std::exp(log_f)};
}

// Golden-section minimum of ssr over t = ln s within [lo, hi].
double golden_minimum(const std::vector<EfficiencySample>& data, double lo,
                      double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = profile_residual(data, std::exp(c)).first;
    double fd = profile_residual(data, std::exp(d)).first;
    while (b - a > 1e-12) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = profile_residual(data, std::exp(c)).first;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = profile_residual(data, std::exp(d)).first;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

BackProjection back_project(std::span<const ScalingPoint> points,
                            double efficiency_floor, double slope_threshold) {
    if (!(efficiency_floor > 0.0)) {
        throw Error("efficiency floor must be positive");
    }

    std::vector<EfficiencySample> data;
    std::vector<ScalingPoint> efficiency_points;
    for (const auto& p : points) {
        if (p.kind != MeasurementKind::Efficiency) continue;
        check_point(p);
        data.push_back(
            {static_cast<double>(p.n), std::log(p.value)});
        efficiency_points.push_back(p);
    }
    std::vector<double> distinct;
    for (const auto& s : data) distinct.push_back(s.n);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    if (distinct.size() < 3) {
        throw FitError(
            "degenerate fit: back-projection needs at least three distinct "
            "processor counts, got " +
            std::to_string(distinct.size()));
    }

    // Search t = ln(1 - alpha) over the full range, then squeeze the best
    // bracket with a golden section. The coarse grid is joined by a handful
    // of fixed starts so a narrow basin near a conventional alpha cannot be
    // stepped over, plus the s = 0 boundary (alpha = 1).
    const double t_lo = std::log(1e-15);
    const double t_hi = 0.0;
    double best_t = t_hi;
    double best_ssr = std::numeric_limits<double>::infinity();
    const auto consider = [&](double t) {
        const double ssr = profile_residual(data, std::exp(t)).first;
        if (ssr < best_ssr) {
            best_ssr = ssr;
            best_t = t;
        }
    };
    constexpr int kGridSteps = 280;
    for (int i = 0; i <= kGridSteps; ++i) {
        consider(t_lo + (t_hi - t_lo) * i / kGridSteps);
    }
    for (double s0 : {0.5, 0.1, 1e-2, 1e-3, 1e-4}) {
        const double t0 = std::log(s0);
        consider(golden_minimum(data, std::max(t_lo, t0 - 2.5),
                                std::min(t_hi, t0 + 2.5)));
    }
    const double step = (t_hi - t_lo) / kGridSteps;
    consider(golden_minimum(data, std::max(t_lo, best_t - step),
                            std::min(t_hi, best_t + step)));

    double best_s = std::exp(best_t);
    auto [ssr, f] = profile_residual(data, best_s);
    // The boundary alpha = 1 (s = 0) is a valid model of perfectly flat
    // series; take it when it does at least as well as the interior best.
    {
        const auto [ssr0, f0] = profile_residual(data, 0.0);
        if (ssr0 <= ssr) {
            best_s = 0.0;
            ssr = ssr0;
            f = f0;
        }
    }
    if (!std::isfinite(ssr) || !std::isfinite(f)) {
        throw FitError("back-projection fit did not converge", ssr);
    }

    BackProjection bp{};
    bp.efficiency_at_1 = f;
    bp.foreign_fraction = 1.0 - f;
    bp.alpha_fit = 1.0 - best_s;

    bool decreasing = false;
    try {
        const auto estimates = estimate_series(efficiency_points);
        decreasing = diagnose_series(estimates, slope_threshold).trend ==
                     Trend::Decreasing;
    } catch (const DataError&) {
        // Not enough invertible points for a trend; fall back to f alone.
    }
    bp.artifact_detected = f < efficiency_floor || decreasing;
    return bp;
}

}  // namespace parscale
