#pragma once

#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parscale/types.hpp"

namespace parscale {

// CSV ingest and serialization. All three formats share the same rules:
// a header line is required, blank lines and #-comments are skipped, fields
// are split on bare commas (labels must not contain commas), and numbers are
// parsed and written locale-independently. Parsing what the writer produced
// returns the original values exactly.

enum class DatasetFormat {
    TimingCsv,      ///< label,n_procs,time_seconds
    EfficiencyCsv,  ///< label,n_procs,efficiency
    Top500Csv       ///< name,year,cores,rmax_gflops,rpeak_gflops
};

inline constexpr std::string_view kTimingCsvHeader =
    "label,n_procs,time_seconds";
inline constexpr std::string_view kEfficiencyCsvHeader =
    "label,n_procs,efficiency";
inline constexpr std::string_view kTop500CsvHeader =
    "name,year,cores,rmax_gflops,rpeak_gflops";

/// Read measurement rows (TimingCsv or EfficiencyCsv). Across-row label
/// mixing is allowed; rows keep file order. Throws ParseError with the
/// 1-based line number for malformed or out-of-range rows.
std::vector<ScalingPoint> load_scaling_points(std::string_view text,
                                              DatasetFormat format);
std::vector<ScalingPoint> load_scaling_points(std::istream& in,
                                              DatasetFormat format);

/// Read machine snapshots (Top500Csv). Rows with rmax > rpeak are rejected.
std::vector<MachineRecord> load_machine_records(std::string_view text);
std::vector<MachineRecord> load_machine_records(std::istream& in);

/// Serialize rows under the canonical header for the format. Doubles are
/// written with the shortest representation that parses back bit-exactly.
std::string write_scaling_points(std::span<const ScalingPoint> points,
                                 DatasetFormat format);
std::string write_machine_records(std::span<const MachineRecord> records);

/// View a machine snapshot as one efficiency measurement at N = cores with
/// value rmax/rpeak, labelled by the machine name.
ScalingPoint machine_to_point(const MachineRecord& record);

}  // namespace parscale
