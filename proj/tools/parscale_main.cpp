// parscale: batch front-end for the scaling analytics library.
//
// Exit codes: 0 success, 1 data/validation error, 2 usage error. Data goes
// to --output (stdout by default); notes and errors go to stderr, so runs
// compose in pipelines such as `parscale simulate ... | parscale alpha`.

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parscale/dataset.hpp"
#include "parscale/errors.hpp"
#include "parscale/estimator.hpp"
#include "parscale/reporting.hpp"
#include "parscale/scaling_laws.hpp"
#include "parscale/simulator.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw parscale::Error("cannot open input file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw parscale::Error("cannot open output file: " + path);
    out << content;
}

// The loader does not validate header names, so the front-end peeks at the
// header to tell the two measurement formats apart when --format is "auto".
parscale::DatasetFormat detect_format(const std::string& text,
                                      const std::string& requested) {
    if (requested == "timing") return parscale::DatasetFormat::TimingCsv;
    if (requested == "efficiency") {
        return parscale::DatasetFormat::EfficiencyCsv;
    }
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (line == parscale::kTimingCsvHeader) {
            return parscale::DatasetFormat::TimingCsv;
        }
        if (line == parscale::kEfficiencyCsvHeader) {
            return parscale::DatasetFormat::EfficiencyCsv;
        }
        break;
    }
    throw parscale::Error(
        "cannot tell timing from efficiency input by its header; pass "
        "--format timing or --format efficiency");
}

// Restrict a table to one series, either the requested label or the only
// label present. Listing the labels on failure keeps retries cheap.
std::vector<parscale::ScalingPoint> select_series(
    std::vector<parscale::ScalingPoint> points, const std::string& series) {
    if (points.empty()) throw parscale::Error("input has no data rows");
    std::set<std::string> labels;
    for (const auto& p : points) labels.insert(p.label);
    if (!series.empty()) {
        if (labels.count(series) == 0) {
            std::string msg = "no series named '" + series +
                              "'; the input contains:";
            for (const auto& l : labels) msg += " " + l;
            throw parscale::Error(msg);
        }
        std::erase_if(points, [&](const parscale::ScalingPoint& p) {
            return p.label != series;
        });
        return points;
    }
    if (labels.size() > 1) {
        std::string msg = "input contains several series; pick one with "
                          "--series:";
        for (const auto& l : labels) msg += " " + l;
        throw parscale::Error(msg);
    }
    return points;
}

struct MeasureArgs {
    std::string input = "-";
    std::string output = "-";
    std::string format = "auto";
    std::string series;
    double slope_threshold = parscale::kDefaultSlopeThreshold;
    double artifact_efficiency = parscale::kDefaultEfficiencyFloor;
    std::string plot_csv;
    std::string plot_svg;
};

void add_measure_options(CLI::App* cmd, MeasureArgs& args) {
    cmd->add_option("-i,--input", args.input,
                    "measurement CSV path, - for stdin");
    cmd->add_option("-o,--output", args.output,
                    "report path, - for stdout");
    cmd->add_option("--format", args.format,
                    "input format: auto, timing or efficiency")
        ->check(CLI::IsMember({"auto", "timing", "efficiency"}));
    cmd->add_option("--series", args.series,
                    "series label to analyze when the input has several");
    cmd->add_option("--slope-threshold", args.slope_threshold,
                    "constancy threshold for the trend slope");
    cmd->add_option("--plot-csv", args.plot_csv,
                    "also write the sequential-fraction plot as CSV");
    cmd->add_option("--plot-svg", args.plot_svg,
                    "also write the sequential-fraction plot as SVG");
}

void emit_estimate_plots(const MeasureArgs& args,
                         const std::vector<parscale::AlphaEstimate>& est) {
    if (!args.plot_csv.empty()) {
        write_output(args.plot_csv,
                     emit_plot(est, parscale::PlotTarget::PlotCsv));
    }
    if (!args.plot_svg.empty()) {
        write_output(args.plot_svg,
                     emit_plot(est, parscale::PlotTarget::VectorGraphic));
    }
}

int run_measure(const MeasureArgs& args, bool with_back_projection) {
    const std::string text = read_input(args.input);
    const auto format = detect_format(text, args.format);
    const auto points =
        select_series(parscale::load_scaling_points(text, format),
                      args.series);

    parscale::Report report;
    report.estimates = parscale::estimate_series(points);
    report.diagnostics =
        parscale::diagnose_series(report.estimates, args.slope_threshold);
    if (with_back_projection) {
        if (format == parscale::DatasetFormat::TimingCsv) {
            std::cerr << "note: back-projection needs efficiency "
                         "measurements; section omitted\n";
        } else {
            try {
                report.back_projection = parscale::back_project(
                    points, args.artifact_efficiency, args.slope_threshold);
            } catch (const parscale::FitError& e) {
                std::cerr << "note: back-projection skipped: " << e.what()
                          << "\n";
            }
        }
    }
    write_output(args.output, parscale::render_report(report));
    emit_estimate_plots(args, report.estimates);
    return 0;
}

struct SurfaceArgs {
    std::vector<std::uint64_t> n{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    std::vector<double> alpha{0.5, 0.9, 0.99, 0.999};
    std::string output = "-";
    std::string plot_svg;
};

int run_surface(const SurfaceArgs& args) {
    const auto surface = parscale::efficiency_surface(args.n, args.alpha);
    write_output(args.output,
                 emit_plot(surface, parscale::PlotTarget::PlotCsv));
    if (!args.plot_svg.empty()) {
        write_output(args.plot_svg,
                     emit_plot(surface, parscale::PlotTarget::VectorGraphic));
    }
    return 0;
}

struct PredictArgs {
    std::string machines;
    std::string name;
    std::string machine_name = "machine";
    int year = 0;
    std::uint64_t cores = 0;
    double rmax = 0.0;
    double rpeak = 0.0;
    std::vector<std::uint64_t> targets;
    double kappa = 0.0;
    std::string growth = "linear";
    std::string output = "-";
    std::string plot_csv;
    std::string plot_svg;
};

parscale::MachineRecord resolve_machine(const PredictArgs& args) {
    if (!args.machines.empty()) {
        const auto records =
            parscale::load_machine_records(read_input(args.machines));
        if (records.empty()) {
            throw parscale::Error("machine file has no rows");
        }
        if (args.name.empty()) {
            if (records.size() == 1) return records.front();
            std::string msg = "machine file has several rows; pick one "
                              "with --name:";
            for (const auto& r : records) msg += " " + r.name;
            throw parscale::Error(msg);
        }
        for (const auto& r : records) {
            if (r.name == args.name) return r;
        }
        throw parscale::Error("no machine named '" + args.name + "'");
    }
    if (args.cores == 0 || args.rmax <= 0.0 || args.rpeak <= 0.0) {
        throw UsageError(
            "predict needs either --machines FILE or all of --cores, "
            "--rmax and --rpeak");
    }
    return {args.machine_name, args.year, args.cores, args.rmax, args.rpeak};
}

int run_predict(const PredictArgs& args) {
    const auto machine = resolve_machine(args);
    std::vector<std::uint64_t> targets = args.targets;
    if (targets.empty()) {
        for (std::uint64_t f = 1; f <= 1024; f *= 4) {
            targets.push_back(machine.cores * f);
        }
    }
    const auto growth = args.growth == "log"
                            ? parscale::OverheadGrowth::LogarithmicInN
                            : parscale::OverheadGrowth::LinearInN;
    const auto diagram =
        parscale::predict_from_snapshot(machine, targets, args.kappa, growth);

    parscale::Report report;
    report.predictions.push_back(diagram);
    write_output(args.output, parscale::render_report(report));
    if (!args.plot_csv.empty()) {
        write_output(args.plot_csv,
                     emit_plot(diagram, parscale::PlotTarget::PlotCsv));
    }
    if (!args.plot_svg.empty()) {
        write_output(args.plot_svg,
                     emit_plot(diagram, parscale::PlotTarget::VectorGraphic));
    }
    return 0;
}

struct SimulateArgs {
    std::string config;
    std::vector<std::uint64_t> n;
    std::uint32_t reps = 1;
    std::uint64_t seed = 0;
    std::string timing = "total";
    std::string measure = "time";
    std::string label = "sim";
    std::string output = "-";
};

int run_simulate(const SimulateArgs& args) {
    const auto config = parscale::parse_sim_config(read_input(args.config));
    const auto timing = args.timing == "extended"
                            ? parscale::TimingMode::Extended
                            : parscale::TimingMode::Total;
    std::string csv;
    if (args.measure == "efficiency") {
        const auto points = parscale::simulate_efficiency_sweep(
            config, args.n, args.reps, args.seed, timing, args.label);
        csv = parscale::write_scaling_points(
            points, parscale::DatasetFormat::EfficiencyCsv);
    } else {
        const auto points = parscale::simulate_sweep(
            config, args.n, args.reps, args.seed, timing, args.label);
        csv = parscale::write_scaling_points(
            points, parscale::DatasetFormat::TimingCsv);
    }
    write_output(args.output, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel scaling analytics: estimate effective parallel "
                 "fractions, simulate dispatch timelines and extrapolate "
                 "payload performance"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "parscale 0.1.0");

    MeasureArgs alpha_args;
    auto* alpha_cmd = app.add_subcommand(
        "alpha", "estimate the effective parallel fraction per data point");
    add_measure_options(alpha_cmd, alpha_args);

    MeasureArgs analyze_args;
    auto* analyze_cmd = app.add_subcommand(
        "analyze",
        "full pipeline: estimates, trend diagnosis and back-projection");
    add_measure_options(analyze_cmd, analyze_args);
    analyze_cmd->add_option("--artifact-efficiency",
                            analyze_args.artifact_efficiency,
                            "back-projected efficiency below this flags an "
                            "artifact");

    SurfaceArgs surface_args;
    auto* surface_cmd = app.add_subcommand(
        "surface", "tabulate strong-scaling efficiency over (alpha, N)");
    surface_cmd->add_option("--n", surface_args.n, "processor counts")
        ->delimiter(',');
    surface_cmd->add_option("--alpha", surface_args.alpha,
                            "parallel fractions")
        ->delimiter(',');
    surface_cmd->add_option("-o,--output", surface_args.output,
                            "plot CSV path, - for stdout");
    surface_cmd->add_option("--plot-svg", surface_args.plot_svg,
                            "also write the surface as SVG");

    PredictArgs predict_args;
    auto* predict_cmd = app.add_subcommand(
        "predict", "extrapolate payload performance from a machine snapshot");
    predict_cmd->add_option("--machines", predict_args.machines,
                            "machine CSV path, - for stdin");
    predict_cmd->add_option("--name", predict_args.name,
                            "machine name within --machines");
    predict_cmd->add_option("--machine-name", predict_args.machine_name,
                            "label for an inline snapshot");
    predict_cmd->add_option("--year", predict_args.year,
                            "year for an inline snapshot");
    predict_cmd->add_option("--cores", predict_args.cores,
                            "core count for an inline snapshot");
    predict_cmd->add_option("--rmax", predict_args.rmax,
                            "measured GFLOPS for an inline snapshot");
    predict_cmd->add_option("--rpeak", predict_args.rpeak,
                            "theoretical GFLOPS for an inline snapshot");
    predict_cmd->add_option("--targets", predict_args.targets,
                            "processor counts to extrapolate to")
        ->delimiter(',');
    predict_cmd->add_option("--kappa", predict_args.kappa,
                            "erosion rate of the parallel fraction");
    predict_cmd->add_option("--growth", predict_args.growth,
                            "erosion growth: linear or log")
        ->check(CLI::IsMember({"linear", "log"}));
    predict_cmd->add_option("-o,--output", predict_args.output,
                            "report path, - for stdout");
    predict_cmd->add_option("--plot-csv", predict_args.plot_csv,
                            "also write the diagram as plot CSV");
    predict_cmd->add_option("--plot-svg", predict_args.plot_svg,
                            "also write the diagram as SVG");

    SimulateArgs simulate_args;
    auto* simulate_cmd = app.add_subcommand(
        "simulate", "run seeded dispatch-timeline sweeps from a config file");
    simulate_cmd
        ->add_option("--config", simulate_args.config,
                     "key=value config path, - for stdin")
        ->required();
    simulate_cmd->add_option("--n", simulate_args.n, "unit counts to sweep")
        ->delimiter(',')
        ->required();
    simulate_cmd->add_option("--reps", simulate_args.reps,
                             "repetitions averaged per count");
    simulate_cmd->add_option("--seed", simulate_args.seed, "sweep seed");
    simulate_cmd
        ->add_option("--timing", simulate_args.timing,
                     "clock to report: total or extended")
        ->check(CLI::IsMember({"total", "extended"}));
    simulate_cmd
        ->add_option("--measure", simulate_args.measure,
                     "output measurement: time or efficiency")
        ->check(CLI::IsMember({"time", "efficiency"}));
    simulate_cmd->add_option("--label", simulate_args.label,
                             "series label for the output rows");
    simulate_cmd->add_option("-o,--output", simulate_args.output,
                             "CSV path, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*alpha_cmd) return run_measure(alpha_args, false);
        if (*analyze_cmd) return run_measure(analyze_args, true);
        if (*surface_cmd) return run_surface(surface_args);
        if (*predict_cmd) return run_predict(predict_args);
        if (*simulate_cmd) return run_simulate(simulate_args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const parscale::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
