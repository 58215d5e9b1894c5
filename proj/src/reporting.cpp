#include "parscale/reporting.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "parscale/errors.hpp"
#include "parscale/scaling_laws.hpp"

namespace parscale {

std::vector<SurfaceSample> efficiency_surface(
    std::span<const std::uint64_t> n_grid,
    std::span<const double> alpha_grid) {
    std::vector<SurfaceSample> samples;
    samples.reserve(n_grid.size() * alpha_grid.size());
    for (double alpha : alpha_grid) {
        for (std::uint64_t n : n_grid) {
            samples.push_back({n, alpha, amdahl_efficiency(alpha, n)});
        }
    }
    return samples;
}

PredictionDiagram predict_from_snapshot(const MachineRecord& record,
                                        std::span<const std::uint64_t> n_targets,
                                        double kappa, OverheadGrowth growth) {
    if (record.cores == 0) throw Error("machine record has zero cores");
    if (!(record.rmax_gflops > 0.0) || !(record.rpeak_gflops > 0.0)) {
        throw Error("machine record needs positive rmax and rpeak");
    }
    if (record.rmax_gflops > record.rpeak_gflops) {
        throw Error("machine record has rmax above rpeak");
    }
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw Error("erosion rate kappa must be finite and non-negative");
    }

    const AlphaReading reading =
        alpha_from_efficiency(record.efficiency(), record.cores);
    if (reading.out_of_model) {
        throw OutOfModelError(
            "snapshot efficiency is below 1/cores; no scaling model with "
            "alpha in [0, 1] reproduces it");
    }

    PredictionDiagram diagram;
    diagram.alpha = reading.value;
    diagram.p_single =
        record.rpeak_gflops / static_cast<double>(record.cores);
    diagram.snapshot = record;

    const ScalingModel model =
        kappa > 0.0 ? ScalingModel::second_order(reading.value, kappa, growth)
                    : ScalingModel::first_order(reading.value);
    diagram.points.reserve(n_targets.size());
    for (std::uint64_t n : n_targets) {
        diagram.points.push_back(
            {n, model_payload_performance(model, n, diagram.p_single)});
    }
    return diagram;
}

namespace {

// All numbers in reports go through this: 12 significant digits, C locale
// semantics, NaN/Inf rendered as null.
std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void append_escaped(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
}

std::string json_string(std::string_view s) {
    std::string out = "\"";
    append_escaped(out, s);
    out += "\"";
    return out;
}

const char* trend_name(Trend t) {
    switch (t) {
        case Trend::Constant: return "constant";
        case Trend::Increasing: return "increasing";
        case Trend::Decreasing: return "decreasing";
    }
    return "constant";
}

const char* source_name(EstimateSource s) {
    return s == EstimateSource::FromSpeedup ? "speedup" : "efficiency";
}

// Tiny indenting JSON builder. Callers emit keys in a fixed order, which is
// the whole point: the rendering is deterministic down to the byte.
struct JsonWriter {
    std::string out;
    int depth = 0;
    bool line_open = false;

    void indent() {
        for (int i = 0; i < depth; ++i) out += "  ";
    }
    void open(const char* bracket) {
        out += bracket;
        out += "\n";
        ++depth;
    }
    void close(const char* bracket, bool comma) {
        --depth;
        indent();
        out += bracket;
        if (comma) out += ",";
        out += "\n";
    }
    void field(const char* key, const std::string& value, bool comma) {
        indent();
        out += json_string(key);
        out += ": ";
        out += value;
        if (comma) out += ",";
        out += "\n";
    }
    void open_field(const char* key, const char* bracket) {
        indent();
        out += json_string(key);
        out += ": ";
        open(bracket);
    }
};

}  // namespace

std::string render_report(const Report& report) {
    JsonWriter w;
    w.open("{");

    w.open_field("estimates", "[");
    for (std::size_t i = 0; i < report.estimates.size(); ++i) {
        const auto& e = report.estimates[i];
        w.indent();
        w.open("{");
        w.field("label", json_string(e.label), true);
        w.field("n_procs", std::to_string(e.n), true);
        w.field("source", json_string(source_name(e.source)), true);
        w.field("alpha_eff", json_number(e.alpha_eff), true);
        w.field("one_minus_alpha", json_number(e.one_minus_alpha), true);
        w.field("out_of_model", e.out_of_model ? "true" : "false", false);
        w.close("}", i + 1 < report.estimates.size());
    }
    w.close("]", true);

    if (report.diagnostics) {
        const auto& d = *report.diagnostics;
        w.open_field("diagnostics", "{");
        w.field("mean_one_minus_alpha", json_number(d.mean_one_minus_alpha),
                true);
        w.field("relative_spread", json_number(d.relative_spread), true);
        w.field("trend", json_string(trend_name(d.trend)), true);
        w.field("trend_slope", json_number(d.trend_slope), true);
        w.field("points_used", std::to_string(d.points_used), true);
        w.field("excluded_out_of_model",
                std::to_string(d.excluded_out_of_model), true);
        w.field("excluded_zero", std::to_string(d.excluded_zero), false);
        w.close("}", true);
    } else {
        w.field("diagnostics", "null", true);
    }

    if (report.back_projection) {
        const auto& b = *report.back_projection;
        w.open_field("back_projection", "{");
        w.field("efficiency_at_1", json_number(b.efficiency_at_1), true);
        w.field("foreign_fraction", json_number(b.foreign_fraction), true);
        w.field("alpha_fit", json_number(b.alpha_fit), true);
        w.field("artifact_detected", b.artifact_detected ? "true" : "false",
                false);
        w.close("}", true);
    } else {
        w.field("back_projection", "null", true);
    }

    w.open_field("predictions", "[");
    for (std::size_t i = 0; i < report.predictions.size(); ++i) {
        const auto& p = report.predictions[i];
        w.indent();
        w.open("{");
        w.field("machine", json_string(p.snapshot.name), true);
        w.field("year", std::to_string(p.snapshot.year), true);
        w.field("cores", std::to_string(p.snapshot.cores), true);
        w.field("rmax_gflops", json_number(p.snapshot.rmax_gflops), true);
        w.field("rpeak_gflops", json_number(p.snapshot.rpeak_gflops), true);
        w.field("alpha", json_number(p.alpha), true);
        w.field("p_single_gflops", json_number(p.p_single), true);
        w.open_field("points", "[");
        for (std::size_t j = 0; j < p.points.size(); ++j) {
            w.indent();
            w.open("{");
            w.field("n_procs", std::to_string(p.points[j].n), true);
            w.field("payload_gflops", json_number(p.points[j].p), false);
            w.close("}", j + 1 < p.points.size());
        }
        w.close("]", false);
        w.close("}", i + 1 < report.predictions.size());
    }
    w.close("]", false);

    w.close("}", false);
    return w.out;
}

namespace {

std::string shortest_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct PlotSeries {
    std::string name;
    std::vector<std::array<double, 2>> points;
    bool draw_line = true;
};

std::string plot_csv(const std::vector<PlotSeries>& series) {
    std::string out = "series,x,y\n";
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            out += s.name;
            out += ",";
            // Every x in these plots is a processor count; keep it integral
            // so the table reloads as measurement rows.
            if (x == std::floor(x) && x >= 0.0 && x <= 9007199254740992.0) {
                out += std::to_string(static_cast<std::uint64_t>(x));
            } else {
                out += shortest_double(x);
            }
            out += ",";
            out += shortest_double(y);
            out += "\n";
        }
    }
    return out;
}

std::string svg_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void append_xml_escaped(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
}

constexpr std::array<const char*, 6> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

// Self-contained SVG renderer: fixed canvas, optional log axes, markers,
// legend on the right. Only relies on drawable (finite, log-compatible)
// points, which the callers have already filtered.
std::string render_svg(const std::vector<PlotSeries>& series,
                       const char* x_label, const char* y_label, bool log_x,
                       bool log_y) {
    constexpr double kWidth = 720.0, kHeight = 480.0;
    constexpr double kLeft = 64.0, kRight = 150.0, kTop = 18.0, kBottom = 48.0;

    const auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
    const auto ty = [&](double y) { return log_y ? std::log10(y) : y; };

    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            const double vx = tx(x), vy = ty(y);
            if (first) {
                x_min = x_max = vx;
                y_min = y_max = vy;
                first = false;
            } else {
                x_min = std::min(x_min, vx);
                x_max = std::max(x_max, vx);
                y_min = std::min(y_min, vy);
                y_max = std::max(y_max, vy);
            }
        }
    }
    if (first) throw Error("plot needs at least one drawable point");
    if (x_min == x_max) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_min == y_max) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double x_pad = 0.04 * (x_max - x_min);
    const double y_pad = 0.04 * (y_max - y_min);
    x_min -= x_pad;
    x_max += x_pad;
    y_min -= y_pad;
    y_max += y_pad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto px = [&](double x) {
        return kLeft + (tx(x) - x_min) / (x_max - x_min) * plot_w;
    };
    const auto py = [&](double y) {
        return kHeight - kBottom - (ty(y) - y_min) / (y_max - y_min) * plot_h;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" "
           "height=\"480\" viewBox=\"0 0 720 480\" font-family=\"sans-serif\" "
           "font-size=\"12\">\n";
    svg += "<rect x=\"" + svg_coord(kLeft) + "\" y=\"" + svg_coord(kTop) +
           "\" width=\"" + svg_coord(plot_w) + "\" height=\"" +
           svg_coord(plot_h) +
           "\" fill=\"white\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // Ticks and grid: 5 stops, even in transformed coordinates.
    for (int i = 0; i <= 4; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 4.0;
        const double vx = log_x ? std::pow(10.0, fx) : fx;
        const double gx = kLeft + plot_w * i / 4.0;
        svg += "<line x1=\"" + svg_coord(gx) + "\" y1=\"" + svg_coord(kTop) +
               "\" x2=\"" + svg_coord(gx) + "\" y2=\"" +
               svg_coord(kHeight - kBottom) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + svg_coord(gx) + "\" y=\"" +
               svg_coord(kHeight - kBottom + 16.0) +
               "\" text-anchor=\"middle\">" + tick_label(vx) + "</text>\n";

        const double fy = y_min + (y_max - y_min) * i / 4.0;
        const double vy = log_y ? std::pow(10.0, fy) : fy;
        const double gy = kHeight - kBottom - plot_h * i / 4.0;
        svg += "<line x1=\"" + svg_coord(kLeft) + "\" y1=\"" + svg_coord(gy) +
               "\" x2=\"" + svg_coord(kWidth - kRight) + "\" y2=\"" +
               svg_coord(gy) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + svg_coord(kLeft - 6.0) + "\" y=\"" +
               svg_coord(gy + 4.0) + "\" text-anchor=\"end\">" +
               tick_label(vy) + "</text>\n";
    }

    svg += "<text x=\"" + svg_coord(kLeft + plot_w / 2.0) + "\" y=\"" +
           svg_coord(kHeight - 10.0) + "\" text-anchor=\"middle\">";
    append_xml_escaped(svg, x_label);
    svg += "</text>\n";
    svg += "<text x=\"16\" y=\"" + svg_coord(kTop + plot_h / 2.0) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           svg_coord(kTop + plot_h / 2.0) + ")\">";
    append_xml_escaped(svg, y_label);
    svg += "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % kPalette.size()];
        if (s.draw_line && s.points.size() > 1) {
            svg += "<polyline fill=\"none\" stroke=\"";
            svg += color;
            svg += "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.points.size(); ++i) {
                if (i > 0) svg += " ";
                svg += svg_coord(px(s.points[i][0])) + "," +
                       svg_coord(py(s.points[i][1]));
            }
            svg += "\"/>\n";
        }
        for (const auto& [x, y] : s.points) {
            svg += "<circle cx=\"" + svg_coord(px(x)) + "\" cy=\"" +
                   svg_coord(py(y)) + "\" r=\"3\" fill=\"";
            svg += color;
            svg += "\"/>\n";
        }
        const double ly = kTop + 14.0 + 18.0 * static_cast<double>(si);
        svg += "<line x1=\"" + svg_coord(kWidth - kRight + 10.0) + "\" y1=\"" +
               svg_coord(ly - 4.0) + "\" x2=\"" +
               svg_coord(kWidth - kRight + 30.0) + "\" y2=\"" +
               svg_coord(ly - 4.0) + "\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + svg_coord(kWidth - kRight + 36.0) + "\" y=\"" +
               svg_coord(ly) + "\">";
        append_xml_escaped(svg, s.name);
        svg += "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace

std::string emit_plot(std::span<const SurfaceSample> surface,
                      PlotTarget target) {
    if (surface.empty()) throw Error("plot needs a non-empty surface");
    std::vector<PlotSeries> series;
    for (const auto& sample : surface) {
        const std::string name = "alpha=" + shortest_double(sample.alpha);
        if (series.empty() || series.back().name != name) {
            series.push_back({name, {}, true});
        }
        series.back().points.push_back(
            {static_cast<double>(sample.n), sample.efficiency});
    }
    if (target == PlotTarget::PlotCsv) return plot_csv(series);
    return render_svg(series, "processors", "efficiency", true, false);
}

std::string emit_plot(std::span<const AlphaEstimate> estimates,
                      PlotTarget target) {
    if (estimates.empty()) throw Error("plot needs a non-empty series");
    std::vector<PlotSeries> series;
    for (const auto& e : estimates) {
        if (e.out_of_model || !(e.one_minus_alpha > 0.0)) {
            continue;  // nothing drawable on a log value axis
        }
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const auto& s) { return s.name == e.label; });
        if (it == series.end()) {
            series.push_back({e.label, {}, true});
            it = std::prev(series.end());
        }
        it->points.push_back(
            {static_cast<double>(e.n), e.one_minus_alpha});
    }
    if (series.empty()) {
        throw Error("no drawable estimates: every point is flagged or zero");
    }
    if (target == PlotTarget::PlotCsv) return plot_csv(series);
    return render_svg(series, "processors", "sequential fraction", false,
                      true);
}

std::string emit_plot(const PredictionDiagram& diagram, PlotTarget target) {
    if (diagram.points.empty()) throw Error("plot needs prediction points");
    std::vector<PlotSeries> series;
    series.push_back({"prediction", {}, true});
    for (const auto& p : diagram.points) {
        series[0].points.push_back({static_cast<double>(p.n), p.p});
    }
    series.push_back({"snapshot",
                      {{static_cast<double>(diagram.snapshot.cores),
                        diagram.snapshot.rmax_gflops}},
                      false});
    if (target == PlotTarget::PlotCsv) return plot_csv(series);
    return render_svg(series, "processors", "payload performance", true,
                      true);
}

}  // namespace parscale
