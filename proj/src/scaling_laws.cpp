#include "parscale/scaling_laws.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace parscale {

namespace {

void check_alpha(double alpha, const char* name) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(std::string(name) + " must lie in [0, 1], got " +
                    std::to_string(alpha));
    }
}

void check_n(std::uint64_t n) {
    if (n == 0) throw Error("processor count must be at least 1");
}

constexpr std::uint64_t kMaxN = std::uint64_t{1} << 53;  // exact in a double

}  // namespace

double amdahl_speedup(double alpha, std::uint64_t n) {
    check_alpha(alpha, "alpha");
    check_n(n);
    const double nn = static_cast<double>(n);
    return nn / (nn * (1.0 - alpha) + alpha);
}

double amdahl_speedup(long double alpha, std::uint64_t n) {
    if (!(alpha >= 0.0L && alpha <= 1.0L)) {
        throw Error("alpha must lie in [0, 1]");
    }
    check_n(n);
    const long double nn = static_cast<long double>(n);
    // N - alpha*(N-1) equals N*(1-alpha) + alpha without forming 1 - alpha,
    // which would shed the extra mantissa bits this overload exists for.
    return static_cast<double>(nn / (nn - alpha * (nn - 1.0L)));
}

double amdahl_efficiency(double alpha, std::uint64_t n) {
    check_alpha(alpha, "alpha");
    check_n(n);
    const double nn = static_cast<double>(n);
    return 1.0 / (nn * (1.0 - alpha) + alpha);
}

AlphaReading alpha_from_speedup(double speedup, std::uint64_t n) {
    check_n(n);
    if (n == 1) {
        throw SingularityError(
            "effective parallel portion is undefined at N = 1");
    }
    if (!(speedup > 0.0)) {
        throw Error("speedup must be positive, got " + std::to_string(speedup));
    }
    const double nn = static_cast<double>(n);
    const double value = nn / (nn - 1.0) * (speedup - 1.0) / speedup;
    return {value, value < 0.0 || value > 1.0};
}

AlphaReading alpha_from_efficiency(double efficiency, std::uint64_t n) {
    check_n(n);
    if (n == 1) {
        throw SingularityError(
            "effective parallel portion is undefined at N = 1");
    }
    if (!(efficiency > 0.0)) {
        throw Error("efficiency must be positive, got " +
                    std::to_string(efficiency));
    }
    const double nn = static_cast<double>(n);
    const double value = (efficiency * nn - 1.0) / (efficiency * (nn - 1.0));
    return {value, value < 0.0 || value > 1.0};
}

double gustafson_speedup(double alpha_g, std::uint64_t n) {
    check_alpha(alpha_g, "alpha_g");
    check_n(n);
    return (1.0 - alpha_g) + alpha_g * static_cast<double>(n);
}

double gustafson_efficiency(double alpha_g, std::uint64_t n) {
    check_alpha(alpha_g, "alpha_g");
    check_n(n);
    return alpha_g + (1.0 - alpha_g) / static_cast<double>(n);
}

long double gustafson_to_amdahl(double alpha_g, std::uint64_t n) {
    check_alpha(alpha_g, "alpha_g");
    check_n(n);
    const long double ag = alpha_g;
    const long double nn = static_cast<long double>(n);
    const long double s = (1.0L - ag) + ag * nn;
    const long double alpha = ag * nn / s;
    return alpha > 1.0L ? 1.0L : alpha;  // guard the final rounding
}

double payload_performance(std::uint64_t n, double alpha, double p_single) {
    check_alpha(alpha, "alpha");
    check_n(n);
    if (!(p_single > 0.0)) {
        throw Error("single-processor performance must be positive");
    }
    // Serial-only payload delivers p_single at every N, and one processor
    // delivers p_single under every model; return it exactly so flat curve
    // segments have no rounding wobble.
    if (alpha == 0.0 || n == 1) return p_single;
    const double nn = static_cast<double>(n);
    return nn * p_single / (nn * (1.0 - alpha) + alpha);
}

ScalingModel ScalingModel::first_order(double alpha0) {
    check_alpha(alpha0, "alpha0");
    return {LawKind::AmdahlFirstOrder, alpha0, 0.0, OverheadGrowth::LinearInN};
}

ScalingModel ScalingModel::gustafson(double alpha_g) {
    check_alpha(alpha_g, "alpha_g");
    return {LawKind::Gustafson, alpha_g, 0.0, OverheadGrowth::LinearInN};
}

ScalingModel ScalingModel::second_order(double alpha0, double kappa,
                                        OverheadGrowth growth) {
    check_alpha(alpha0, "alpha0");
    if (!(kappa >= 0.0)) throw Error("kappa must be non-negative");
    return {LawKind::SecondOrder, alpha0, kappa, growth};
}

double effective_alpha_at(const ScalingModel& model, std::uint64_t n) {
    check_n(n);
    check_alpha(model.alpha0, "alpha0");
    switch (model.law) {
        case LawKind::AmdahlFirstOrder:
            return model.alpha0;
        case LawKind::Gustafson:
            return static_cast<double>(gustafson_to_amdahl(model.alpha0, n));
        case LawKind::SecondOrder: {
            if (!(model.kappa >= 0.0)) {
                throw Error("kappa must be non-negative");
            }
            const double nn = static_cast<double>(n);
            const double drop = model.growth == OverheadGrowth::LinearInN
                                    ? model.kappa * (nn - 1.0)
                                    : model.kappa * std::log(nn);
            return std::clamp(model.alpha0 - drop, 0.0, 1.0);
        }
    }
    throw Error("unknown scaling law");
}

double model_payload_performance(const ScalingModel& model, std::uint64_t n,
                                 double p_single) {
    return payload_performance(n, effective_alpha_at(model, n), p_single);
}

namespace {

// Smallest maximizer of value() over [lo, hi], relying on the rise /
// fall / floor shape of the performance curve. Small brackets are scanned
// outright; large ones are narrowed by a ternary search whose equal-value
// branch only moves the upper bound, which keeps plateau fronts inside the
// bracket, then the remainder is scanned.
template <typename F>
std::pair<std::uint64_t, double> smallest_argmax(const F& value,
                                                 std::uint64_t lo,
                                                 std::uint64_t hi) {
    constexpr std::uint64_t kScanLimit = std::uint64_t{1} << 21;
    while (hi - lo > kScanLimit) {
        const std::uint64_t m1 = lo + (hi - lo) / 3;
        const std::uint64_t m2 = hi - (hi - lo) / 3;
        const double v1 = value(m1);
        const double v2 = value(m2);
        if (v1 < v2) {
            lo = m1 + 1;
        } else if (v1 > v2) {
            hi = m2 - 1;
        } else {
            hi = m2;
        }
    }
    std::uint64_t best_n = lo;
    double best_v = value(lo);
    for (std::uint64_t n = lo + 1; n <= hi; ++n) {
        const double v = value(n);
        if (v > best_v) {
            best_v = v;
            best_n = n;
        }
    }
    return {best_n, best_v};
}

}  // namespace

PeakResult find_peak_performance(const ScalingModel& model, double p_single,
                                 std::uint64_t n_max) {
    if (n_max < 2) throw Error("peak search needs n_max >= 2");
    if (n_max > kMaxN) throw Error("n_max exceeds 2^53");
    if (!(p_single > 0.0)) {
        throw Error("single-processor performance must be positive");
    }
    const auto value = [&](std::uint64_t n) {
        return model_payload_performance(model, n, p_single);
    };

    // Without erosion the effective alpha never drops as N grows, so the
    // performance curve never falls and the range end is the answer. This
    // also keeps kappa == 0 second-order models exactly on the first-order
    // result, and sidesteps last-bit wobble on asymptotically flat curves.
    const bool eroding =
        model.law == LawKind::SecondOrder && model.kappa > 0.0;
    if (!eroding) {
        return {n_max, value(n_max), PeakKind::Saturating};
    }

    // Geometric grid with ratio 2^(1/8), endpoints always included.
    std::vector<std::uint64_t> grid{1};
    for (int k = 1;; ++k) {
        const auto c =
            static_cast<std::uint64_t>(std::ceil(std::exp2(k / 8.0)));
        if (c >= n_max) break;
        if (c > grid.back()) grid.push_back(c);
    }
    grid.push_back(n_max);

    std::size_t best = 0;
    double best_v = value(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double v = value(grid[i]);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }

    // The true maximum sits between the grid neighbours of the best sample.
    const std::uint64_t lo = best == 0 ? grid[0] : grid[best - 1];
    const std::uint64_t hi = best + 1 < grid.size() ? grid[best + 1] : n_max;
    const auto [n_star, p_star] = smallest_argmax(value, lo, hi);

    const double p_end = value(n_max);
    if (p_star > p_end) return {n_star, p_star, PeakKind::Peaked};
    return {n_max, p_end, PeakKind::Saturating};
}

}  // namespace parscale
