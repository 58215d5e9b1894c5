#pragma once

#include <cstdint>
#include <string>

namespace parscale {

/// What the value field of a ScalingPoint holds.
enum class MeasurementKind { Time, Speedup, Efficiency };

/// One observation of a parallelized workload at a given processor count.
struct ScalingPoint {
    std::string label;                                   ///< series tag
    std::uint64_t n = 1;                                 ///< processing units
    MeasurementKind kind = MeasurementKind::Efficiency;  ///< unit of value
    double value = 0.0;  ///< seconds, speedup ratio, or efficiency fraction

    bool operator==(const ScalingPoint&) const = default;
};

/// Benchmark snapshot of one machine, TOP500 style.
struct MachineRecord {
    std::string name;
    int year = 0;
    std::uint64_t cores = 1;
    double rmax_gflops = 0.0;  ///< achieved benchmark performance
    double rpeak_gflops = 0.0;  ///< nominal peak performance

    double efficiency() const { return rmax_gflops / rpeak_gflops; }

    bool operator==(const MachineRecord&) const = default;
};

}  // namespace parscale
