#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parscale/types.hpp"

namespace parscale {

// Discrete-event model of one fork-join round: the host runs a sequential
// prologue, dispatches work to fellow units one message at a time, computes
// its own share, absorbs results in arrival order, and runs a sequential
// epilogue. Messages pay topology-dependent propagation delays both ways.
// The simulation is deterministic: identical inputs give identical timelines
// on every platform.

/// Propagation-delay layout between the host and the fellow units.
struct Topology {
    enum class Kind { Uniform, Linear, Clustered };

    Kind kind = Kind::Uniform;
    double pd0 = 0.0;    ///< base one-way delay, charged in both directions
    double slope = 0.0;  ///< Linear: extra one-way delay per fellow index
    std::uint64_t cluster_size = 1;  ///< Clustered: fellows per cluster
    double intra_delay = 0.0;  ///< Clustered: relay hop between cluster members
    double inter_delay = 0.0;  ///< Clustered: hop from host to a cluster head

    static Topology uniform(double pd0 = 0.0);
    static Topology linear(double pd0, double slope);
    static Topology clustered(double pd0, std::uint64_t cluster_size,
                              double intra_delay, double inter_delay);
};

/// Per-unit compute-time jitter. When enabled, a fellow's compute time is
/// scaled by a uniform draw from [1, 1 + width], fixed by (seed, run seed,
/// unit index) through a counter-based generator, so runs are reproducible
/// bit for bit regardless of platform or evaluation order.
struct JitterSpec {
    double width = 0.0;
    std::uint64_t seed = 0;

    bool enabled() const { return width > 0.0; }

    static JitterSpec off();
    static JitterSpec multiplicative(double width, std::uint64_t seed = 0);
};

struct SimConfig {
    double seq_pre = 0.0;        ///< host-only work before any dispatch
    double seq_post = 0.0;       ///< host-only work after the last result
    double dispatch_cost = 0.0;  ///< host time per dispatched message
    double collect_cost = 0.0;   ///< host time per absorbed result
    double payload_total = 1.0;  ///< parallelizable work, split evenly
    double access_latency = 0.0; ///< one-way cost of reaching the system
    Topology topology;
    JitterSpec jitter;
    /// When true the host also computes one share (N units each get 1/N of
    /// the payload); when false the N-1 fellows split the whole payload.
    bool host_computes_share = true;
};

/// One unit's activity inside a run. Unit 0 is the host.
struct UnitTimeline {
    std::uint64_t unit = 0;
    double start = 0.0;           ///< when the unit begins computing
    double compute = 0.0;         ///< compute duration, jitter included
    double return_arrival = 0.0;  ///< when its result is back at the host
};

struct RunResult {
    std::uint64_t n = 1;
    double total_time = 0.0;     ///< completion time, access latency excluded
    double extended_time = 0.0;  ///< total_time + round-trip access latency
    std::vector<UnitTimeline> unit_timelines;  ///< ordered by unit index
};

enum class TimingMode { Total, Extended };

/// The ideal single-processor execution time of the same job:
/// seq_pre + payload_total + seq_post. Used as the nominal reference when
/// forming benchmark-style efficiencies.
double nominal_single_time(const SimConfig& config);

/// Simulate one run on n units. For n == 1 the host does everything and
/// total_time equals nominal_single_time exactly (jitter applies to fellow
/// computation only).
RunResult simulate_run(const SimConfig& config, std::uint64_t n,
                       std::uint64_t seed);

/// Mean measured times over the given processor counts, `repetitions` runs
/// each. N = 1 is prepended when absent so the series carries its own
/// baseline. Total timing stops the clock at job completion; Extended adds
/// the round-trip access latency, the way a remote observer would measure.
std::vector<ScalingPoint> simulate_sweep(const SimConfig& config,
                                         std::span<const std::uint64_t> n_values,
                                         std::uint64_t repetitions,
                                         std::uint64_t seed, TimingMode timing,
                                         std::string_view label = "sim");

/// Benchmark-style efficiencies nominal_single_time / (N * mean time).
/// With Extended timing this reproduces the dilution artifact: the access
/// round trip inflates every measurement, and because it refuses to shrink
/// with N the series back-projects to an efficiency below 1 at N = 1.
std::vector<ScalingPoint> simulate_efficiency_sweep(
    const SimConfig& config, std::span<const std::uint64_t> n_values,
    std::uint64_t repetitions, std::uint64_t seed, TimingMode timing,
    std::string_view label = "sim");

/// Parse a flat key=value config (one pair per line, # comments, unknown
/// keys rejected, later duplicates win). Throws ParseError with the line
/// number on bad input.
SimConfig parse_sim_config(std::string_view text);
SimConfig parse_sim_config(std::istream& in);

/// Serialize a config in the same key=value format; parses back identically.
std::string write_sim_config(const SimConfig& config);

}  // namespace parscale
