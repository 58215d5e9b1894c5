#include "parscale/dataset.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "parscale/errors.hpp"

namespace parscale {

namespace {

// Walks a CSV body line by line, handing non-skippable lines to a callback
// together with their 1-based line number. CRLF endings are tolerated.
template <typename F>
void for_each_row(std::string_view text, const F& on_line) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            // Header names are not validated; re-ingesting compatible CSV
            // (plot output, say) under a different header is deliberate.
            header_seen = true;
            continue;
        }
        on_line(line, line_no);
    }
    if (!header_seen) throw ParseError(line_no + 1, "missing header line");
}

std::vector<std::string_view> split_fields(std::string_view line,
                                           std::size_t expected,
                                           std::size_t line_no) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (fields.size() != expected) {
        throw ParseError(line_no, "expected " + std::to_string(expected) +
                                      " fields, got " +
                                      std::to_string(fields.size()));
    }
    return fields;
}

double field_double(std::string_view v, std::size_t line_no,
                    const char* name) {
    double out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(line_no, std::string("field '") + name +
                                      "': expected a number, got '" +
                                      std::string(v) + "'");
    }
    return out;
}

std::uint64_t field_uint(std::string_view v, std::size_t line_no,
                         const char* name) {
    std::uint64_t out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(line_no,
                         std::string("field '") + name +
                             "': expected a non-negative integer, got '" +
                             std::string(v) + "'");
    }
    return out;
}

int field_int(std::string_view v, std::size_t line_no, const char* name) {
    int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(line_no, std::string("field '") + name +
                                      "': expected an integer, got '" +
                                      std::string(v) + "'");
    }
    return out;
}

double positive_field(std::string_view v, std::size_t line_no,
                      const char* name) {
    const double out = field_double(v, line_no, name);
    if (!(out > 0.0) || !std::isfinite(out)) {
        throw ParseError(line_no, std::string("field '") + name +
                                      "': must be positive, got '" +
                                      std::string(v) + "'");
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::vector<ScalingPoint> load_scaling_points(std::string_view text,
                                              DatasetFormat format) {
    if (format == DatasetFormat::Top500Csv) {
        throw Error("Top500Csv rows are machine records, not scaling points");
    }
    const bool timing = format == DatasetFormat::TimingCsv;
    std::vector<ScalingPoint> points;
    for_each_row(text, [&](std::string_view line, std::size_t line_no) {
        const auto fields = split_fields(line, 3, line_no);
        ScalingPoint p;
        p.label = std::string(fields[0]);
        p.n = field_uint(fields[1], line_no, "n_procs");
        if (p.n == 0) {
            throw ParseError(line_no, "field 'n_procs': must be at least 1");
        }
        p.kind = timing ? MeasurementKind::Time : MeasurementKind::Efficiency;
        p.value = positive_field(fields[2], line_no,
                                 timing ? "time_seconds" : "efficiency");
        points.push_back(std::move(p));
    });
    return points;
}

std::vector<ScalingPoint> load_scaling_points(std::istream& in,
                                              DatasetFormat format) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_scaling_points(std::string_view{buffer.str()}, format);
}

std::vector<MachineRecord> load_machine_records(std::string_view text) {
    std::vector<MachineRecord> records;
    for_each_row(text, [&](std::string_view line, std::size_t line_no) {
        const auto fields = split_fields(line, 5, line_no);
        MachineRecord r;
        r.name = std::string(fields[0]);
        r.year = field_int(fields[1], line_no, "year");
        r.cores = field_uint(fields[2], line_no, "cores");
        if (r.cores == 0) {
            throw ParseError(line_no, "field 'cores': must be at least 1");
        }
        r.rmax_gflops = positive_field(fields[3], line_no, "rmax_gflops");
        r.rpeak_gflops = positive_field(fields[4], line_no, "rpeak_gflops");
        if (r.rmax_gflops > r.rpeak_gflops) {
            throw ParseError(line_no, "rmax_gflops exceeds rpeak_gflops");
        }
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<MachineRecord> load_machine_records(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_machine_records(std::string_view{buffer.str()});
}

std::string write_scaling_points(std::span<const ScalingPoint> points,
                                 DatasetFormat format) {
    if (format == DatasetFormat::Top500Csv) {
        throw Error("Top500Csv rows are machine records, not scaling points");
    }
    const bool timing = format == DatasetFormat::TimingCsv;
    std::string out{timing ? kTimingCsvHeader : kEfficiencyCsvHeader};
    out += "\n";
    for (const auto& p : points) {
        const bool kind_matches =
            timing ? p.kind == MeasurementKind::Time
                   : p.kind == MeasurementKind::Efficiency;
        if (!kind_matches) {
            throw Error("point '" + p.label +
                        "' does not match the requested CSV format");
        }
        out += p.label;
        out += ",";
        out += std::to_string(p.n);
        out += ",";
        out += format_double(p.value);
        out += "\n";
    }
    return out;
}

std::string write_machine_records(std::span<const MachineRecord> records) {
    std::string out{kTop500CsvHeader};
    out += "\n";
    for (const auto& r : records) {
        out += r.name;
        out += ",";
        out += std::to_string(r.year);
        out += ",";
        out += std::to_string(r.cores);
        out += ",";
        out += format_double(r.rmax_gflops);
        out += ",";
        out += format_double(r.rpeak_gflops);
        out += "\n";
    }
    return out;
}

ScalingPoint machine_to_point(const MachineRecord& record) {
    if (record.cores == 0) throw Error("machine record has zero cores");
    if (!(record.rpeak_gflops > 0.0)) {
        throw Error("machine record needs a positive rpeak");
    }
    return {record.name, record.cores, MeasurementKind::Efficiency,
            record.rmax_gflops / record.rpeak_gflops};
}

}  // namespace parscale
