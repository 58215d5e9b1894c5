#include "parscale/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

#include "parscale/errors.hpp"

namespace parscale {

Topology Topology::uniform(double pd0) {
    Topology t;
    t.kind = Kind::Uniform;
    t.pd0 = pd0;
    return t;
}

Topology Topology::linear(double pd0, double slope) {
    Topology t;
    t.kind = Kind::Linear;
    t.pd0 = pd0;
    t.slope = slope;
    return t;
}

Topology Topology::clustered(double pd0, std::uint64_t cluster_size,
                             double intra_delay, double inter_delay) {
    Topology t;
    t.kind = Kind::Clustered;
    t.pd0 = pd0;
    t.cluster_size = cluster_size;
    t.intra_delay = intra_delay;
    t.inter_delay = inter_delay;
    return t;
}

JitterSpec JitterSpec::off() { return {}; }

JitterSpec JitterSpec::multiplicative(double width, std::uint64_t seed) {
    return {width, seed};
}

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw Error(message);
}

void check_duration(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(std::string(name) + " must be a non-negative number");
    }
}

void validate_config(const SimConfig& c) {
    check_duration(c.seq_pre, "seq_pre");
    check_duration(c.seq_post, "seq_post");
    check_duration(c.dispatch_cost, "dispatch_cost");
    check_duration(c.collect_cost, "collect_cost");
    check_duration(c.access_latency, "access_latency");
    require(c.payload_total > 0.0 && std::isfinite(c.payload_total),
            "payload_total must be positive");
    check_duration(c.topology.pd0, "pd0");
    check_duration(c.topology.slope, "pd_slope");
    check_duration(c.topology.intra_delay, "intra_delay");
    check_duration(c.topology.inter_delay, "inter_delay");
    require(c.topology.cluster_size >= 1, "cluster_size must be at least 1");
    check_duration(c.jitter.width, "jitter_width");
}

// splitmix64 finalizer; the standard counter-based scrambler.
std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    return scramble(h + 0x9E3779B97F4A7C15ull * (v + 1));
}

double jitter_multiplier(const JitterSpec& j, std::uint64_t run_seed,
                         std::uint64_t unit) {
    if (!j.enabled()) return 1.0;
    const std::uint64_t h = mix(mix(j.seed, run_seed), unit);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return 1.0 + j.width * u;
}

}  // namespace

double nominal_single_time(const SimConfig& config) {
    validate_config(config);
    return config.seq_pre + config.payload_total + config.seq_post;
}

RunResult simulate_run(const SimConfig& config, std::uint64_t n,
                       std::uint64_t seed) {
    validate_config(config);
    require(n >= 1, "processor count must be at least 1");

    RunResult result;
    result.n = n;
    double cursor = config.seq_pre;

    if (n == 1) {
        result.unit_timelines.push_back(
            {0, cursor, config.payload_total, cursor + config.payload_total});
        cursor += config.payload_total + config.seq_post;
        result.total_time = cursor;
        result.extended_time = cursor + 2.0 * config.access_latency;
        return result;
    }

    const std::uint64_t fellows = n - 1;
    const double share = config.host_computes_share
                             ? config.payload_total / static_cast<double>(n)
                             : config.payload_total / static_cast<double>(fellows);
    auto& units = result.unit_timelines;
    units.resize(n);

    const Topology& topo = config.topology;
    for (std::uint64_t i = 1; i <= fellows; ++i) {
        double inbound = topo.pd0;
        switch (topo.kind) {
            case Topology::Kind::Uniform:
                cursor += config.dispatch_cost;
                break;
            case Topology::Kind::Linear:
                cursor += config.dispatch_cost;
                inbound += topo.slope * static_cast<double>(i);
                break;
            case Topology::Kind::Clustered: {
                const std::uint64_t member = (i - 1) % topo.cluster_size;
                if (member == 0) cursor += config.dispatch_cost;
                inbound += topo.inter_delay +
                           static_cast<double>(member) * topo.intra_delay;
                break;
            }
        }
        const double received = cursor + inbound;
        const double work = share * jitter_multiplier(config.jitter, seed, i);
        units[i] = {i, received, work, received + work + inbound};
    }

    // Host turns to its own share only after the dispatch loop drained.
    const double host_work = config.host_computes_share ? share : 0.0;
    units[0] = {0, cursor, host_work, cursor + host_work};
    cursor += host_work;

    // Absorb results one at a time, earliest arrival first.
    std::vector<std::pair<double, std::uint64_t>> arrivals;
    arrivals.reserve(fellows);
    for (std::uint64_t i = 1; i <= fellows; ++i) {
        arrivals.emplace_back(units[i].return_arrival, i);
    }
    std::sort(arrivals.begin(), arrivals.end());
    for (const auto& [arrival, unit] : arrivals) {
        cursor = std::max(cursor, arrival) + config.collect_cost;
    }

    cursor += config.seq_post;
    result.total_time = cursor;
    result.extended_time = cursor + 2.0 * config.access_latency;
    return result;
}

namespace {

double mean_time(const SimConfig& config, std::uint64_t n,
                 std::uint64_t repetitions, std::uint64_t seed,
                 TimingMode timing) {
    double acc = 0.0;
    for (std::uint64_t r = 0; r < repetitions; ++r) {
        const RunResult run = simulate_run(config, n, mix(mix(seed, n), r));
        acc += timing == TimingMode::Total ? run.total_time
                                           : run.extended_time;
    }
    return acc / static_cast<double>(repetitions);
}

std::vector<std::uint64_t> with_baseline(std::span<const std::uint64_t> ns) {
    require(!ns.empty(), "sweep needs at least one processor count");
    std::vector<std::uint64_t> out;
    out.reserve(ns.size() + 1);
    if (std::find(ns.begin(), ns.end(), std::uint64_t{1}) == ns.end()) {
        out.push_back(1);
    }
    out.insert(out.end(), ns.begin(), ns.end());
    return out;
}

}  // namespace

std::vector<ScalingPoint> simulate_sweep(const SimConfig& config,
                                         std::span<const std::uint64_t> n_values,
                                         std::uint64_t repetitions,
                                         std::uint64_t seed, TimingMode timing,
                                         std::string_view label) {
    validate_config(config);
    require(repetitions >= 1, "repetitions must be at least 1");
    std::vector<ScalingPoint> points;
    for (std::uint64_t n : with_baseline(n_values)) {
        points.push_back({std::string(label), n, MeasurementKind::Time,
                          mean_time(config, n, repetitions, seed, timing)});
    }
    return points;
}

std::vector<ScalingPoint> simulate_efficiency_sweep(
    const SimConfig& config, std::span<const std::uint64_t> n_values,
    std::uint64_t repetitions, std::uint64_t seed, TimingMode timing,
    std::string_view label) {
    validate_config(config);
    require(repetitions >= 1, "repetitions must be at least 1");
    const double reference = nominal_single_time(config);
    std::vector<ScalingPoint> points;
    for (std::uint64_t n : with_baseline(n_values)) {
        const double t = mean_time(config, n, repetitions, seed, timing);
        points.push_back({std::string(label), n, MeasurementKind::Efficiency,
                          reference / (static_cast<double>(n) * t)});
    }
    return points;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(std::string_view v, std::size_t line,
                    const std::string& key) {
    double out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(line, "key '" + key + "': expected a number, got '" +
                                   std::string(v) + "'");
    }
    return out;
}

std::uint64_t parse_uint(std::string_view v, std::size_t line,
                         const std::string& key) {
    std::uint64_t out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(line, "key '" + key +
                                   "': expected a non-negative integer, got '" +
                                   std::string(v) + "'");
    }
    return out;
}

bool parse_bool(std::string_view v, std::size_t line, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError(line, "key '" + key + "': expected true or false, got '" +
                               std::string(v) + "'");
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
    SimConfig config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;

        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected key=value, got '" +
                                          std::string(stripped) + "'");
        }
        const std::string key{trim(stripped.substr(0, eq))};
        const std::string_view value = trim(stripped.substr(eq + 1));

        if (key == "seq_pre") {
            config.seq_pre = parse_double(value, line_no, key);
        } else if (key == "seq_post") {
            config.seq_post = parse_double(value, line_no, key);
        } else if (key == "dispatch_cost") {
            config.dispatch_cost = parse_double(value, line_no, key);
        } else if (key == "collect_cost") {
            config.collect_cost = parse_double(value, line_no, key);
        } else if (key == "payload_total") {
            config.payload_total = parse_double(value, line_no, key);
        } else if (key == "access_latency") {
            config.access_latency = parse_double(value, line_no, key);
        } else if (key == "topology") {
            if (value == "uniform") {
                config.topology.kind = Topology::Kind::Uniform;
            } else if (value == "linear") {
                config.topology.kind = Topology::Kind::Linear;
            } else if (value == "clustered") {
                config.topology.kind = Topology::Kind::Clustered;
            } else {
                throw ParseError(line_no,
                                 "key 'topology': expected uniform, linear or "
                                 "clustered, got '" +
                                     std::string(value) + "'");
            }
        } else if (key == "pd0") {
            config.topology.pd0 = parse_double(value, line_no, key);
        } else if (key == "pd_slope") {
            config.topology.slope = parse_double(value, line_no, key);
        } else if (key == "cluster_size") {
            config.topology.cluster_size = parse_uint(value, line_no, key);
        } else if (key == "intra_delay") {
            config.topology.intra_delay = parse_double(value, line_no, key);
        } else if (key == "inter_delay") {
            config.topology.inter_delay = parse_double(value, line_no, key);
        } else if (key == "jitter") {
            if (value == "off") {
                config.jitter.width = 0.0;
            } else if (value != "multiplicative") {
                throw ParseError(line_no,
                                 "key 'jitter': expected off or "
                                 "multiplicative, got '" +
                                     std::string(value) + "'");
            }
        } else if (key == "jitter_width") {
            config.jitter.width = parse_double(value, line_no, key);
        } else if (key == "jitter_seed") {
            config.jitter.seed = parse_uint(value, line_no, key);
        } else if (key == "host_computes_share") {
            config.host_computes_share = parse_bool(value, line_no, key);
        } else {
            throw ParseError(line_no, "unknown key '" + key + "'");
        }
    }
    return config;
}

SimConfig parse_sim_config(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_sim_config(std::string_view{buffer.str()});
}

std::string write_sim_config(const SimConfig& config) {
    std::string out;
    const auto add = [&](std::string_view key, const std::string& value) {
        out += key;
        out += "=";
        out += value;
        out += "\n";
    };
    add("seq_pre", format_double(config.seq_pre));
    add("seq_post", format_double(config.seq_post));
    add("dispatch_cost", format_double(config.dispatch_cost));
    add("collect_cost", format_double(config.collect_cost));
    add("payload_total", format_double(config.payload_total));
    add("access_latency", format_double(config.access_latency));
    switch (config.topology.kind) {
        case Topology::Kind::Uniform:
            add("topology", "uniform");
            break;
        case Topology::Kind::Linear:
            add("topology", "linear");
            break;
        case Topology::Kind::Clustered:
            add("topology", "clustered");
            break;
    }
    add("pd0", format_double(config.topology.pd0));
    add("pd_slope", format_double(config.topology.slope));
    add("cluster_size", std::to_string(config.topology.cluster_size));
    add("intra_delay", format_double(config.topology.intra_delay));
    add("inter_delay", format_double(config.topology.inter_delay));
    add("jitter", config.jitter.enabled() ? "multiplicative" : "off");
    add("jitter_width", format_double(config.jitter.width));
    add("jitter_seed", std::to_string(config.jitter.seed));
    add("host_computes_share", config.host_computes_share ? "true" : "false");
    return out;
}

}  // namespace parscale
