// Python bindings for the scaling analytics core. Span-taking library
// functions are wrapped with vector copies, which is fine at the data sizes
// this toolkit works with (hundreds of rows, not millions).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <vector>

#include "parscale/dataset.hpp"
#include "parscale/errors.hpp"
#include "parscale/estimator.hpp"
#include "parscale/reporting.hpp"
#include "parscale/scaling_laws.hpp"
#include "parscale/simulator.hpp"

namespace py = pybind11;
using namespace parscale;

PYBIND11_MODULE(_core, m) {
    m.doc() = "parallel scaling analytics: scaling laws, estimation, "
              "timeline simulation, prediction and reporting";

    // Later registrations are consulted first, so the subclasses must come
    // after the base to be matched before it.
    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<SingularityError>(m, "SingularityError",
                                             base.ptr());
    py::register_exception<OutOfModelError>(m, "OutOfModelError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<FitError>(m, "FitError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    py::enum_<MeasurementKind>(m, "MeasurementKind")
        .value("Time", MeasurementKind::Time)
        .value("Speedup", MeasurementKind::Speedup)
        .value("Efficiency", MeasurementKind::Efficiency);

    py::class_<ScalingPoint>(m, "ScalingPoint")
        .def(py::init<>())
        .def(py::init([](std::string label, std::uint64_t n,
                         MeasurementKind kind, double value) {
                 return ScalingPoint{std::move(label), n, kind, value};
             }),
             py::arg("label"), py::arg("n"), py::arg("kind"),
             py::arg("value"))
        .def_readwrite("label", &ScalingPoint::label)
        .def_readwrite("n", &ScalingPoint::n)
        .def_readwrite("kind", &ScalingPoint::kind)
        .def_readwrite("value", &ScalingPoint::value)
        .def("__eq__",
             [](const ScalingPoint& a, const ScalingPoint& b) {
                 return a == b;
             })
        .def("__repr__", [](const ScalingPoint& p) {
            return "ScalingPoint(label='" + p.label +
                   "', n=" + std::to_string(p.n) +
                   ", value=" + std::to_string(p.value) + ")";
        });

    py::class_<MachineRecord>(m, "MachineRecord")
        .def(py::init<>())
        .def(py::init([](std::string name, int year, std::uint64_t cores,
                         double rmax_gflops, double rpeak_gflops) {
                 return MachineRecord{std::move(name), year, cores,
                                      rmax_gflops, rpeak_gflops};
             }),
             py::arg("name"), py::arg("year"), py::arg("cores"),
             py::arg("rmax_gflops"), py::arg("rpeak_gflops"))
        .def_readwrite("name", &MachineRecord::name)
        .def_readwrite("year", &MachineRecord::year)
        .def_readwrite("cores", &MachineRecord::cores)
        .def_readwrite("rmax_gflops", &MachineRecord::rmax_gflops)
        .def_readwrite("rpeak_gflops", &MachineRecord::rpeak_gflops)
        .def("efficiency", &MachineRecord::efficiency)
        .def("__eq__", [](const MachineRecord& a, const MachineRecord& b) {
            return a == b;
        });

    py::class_<AlphaReading>(m, "AlphaReading")
        .def_readonly("value", &AlphaReading::value)
        .def_readonly("out_of_model", &AlphaReading::out_of_model)
        .def("__repr__", [](const AlphaReading& r) {
            return "AlphaReading(value=" + std::to_string(r.value) +
                   ", out_of_model=" + (r.out_of_model ? "True" : "False") +
                   ")";
        });

    m.def("amdahl_speedup",
          static_cast<double (*)(double, std::uint64_t)>(&amdahl_speedup),
          py::arg("alpha"), py::arg("n"));
    m.def("amdahl_efficiency", &amdahl_efficiency, py::arg("alpha"),
          py::arg("n"));
    m.def("alpha_from_speedup", &alpha_from_speedup, py::arg("speedup"),
          py::arg("n"));
    m.def("alpha_from_efficiency", &alpha_from_efficiency,
          py::arg("efficiency"), py::arg("n"));
    m.def("gustafson_speedup", &gustafson_speedup, py::arg("alpha"),
          py::arg("n"));
    m.def("gustafson_efficiency", &gustafson_efficiency, py::arg("alpha"),
          py::arg("n"));
    m.def(
        "gustafson_to_amdahl",
        [](double alpha, std::uint64_t n) {
            return static_cast<double>(gustafson_to_amdahl(alpha, n));
        },
        py::arg("alpha"), py::arg("n"));
    m.def("payload_performance", &payload_performance, py::arg("n"),
          py::arg("alpha"), py::arg("p_single"));

    py::enum_<LawKind>(m, "LawKind")
        .value("AmdahlFirstOrder", LawKind::AmdahlFirstOrder)
        .value("Gustafson", LawKind::Gustafson)
        .value("SecondOrder", LawKind::SecondOrder);

    py::enum_<OverheadGrowth>(m, "OverheadGrowth")
        .value("LinearInN", OverheadGrowth::LinearInN)
        .value("LogarithmicInN", OverheadGrowth::LogarithmicInN);

    py::class_<ScalingModel>(m, "ScalingModel")
        .def_readwrite("law", &ScalingModel::law)
        .def_readwrite("alpha0", &ScalingModel::alpha0)
        .def_readwrite("kappa", &ScalingModel::kappa)
        .def_readwrite("growth", &ScalingModel::growth)
        .def_static("first_order", &ScalingModel::first_order,
                    py::arg("alpha"))
        .def_static("gustafson", &ScalingModel::gustafson, py::arg("alpha"))
        .def_static("second_order", &ScalingModel::second_order,
                    py::arg("alpha0"), py::arg("kappa"),
                    py::arg("growth") = OverheadGrowth::LinearInN);

    m.def("effective_alpha_at", &effective_alpha_at, py::arg("model"),
          py::arg("n"));
    m.def("model_payload_performance", &model_payload_performance,
          py::arg("model"), py::arg("n"), py::arg("p_single"));

    py::enum_<PeakKind>(m, "PeakKind")
        .value("Saturating", PeakKind::Saturating)
        .value("Peaked", PeakKind::Peaked);

    py::class_<PeakResult>(m, "PeakResult")
        .def_readonly("n_star", &PeakResult::n_star)
        .def_readonly("p_star", &PeakResult::p_star)
        .def_readonly("kind", &PeakResult::kind);

    m.def("find_peak_performance", &find_peak_performance, py::arg("model"),
          py::arg("p_single"), py::arg("n_max"));

    py::enum_<EstimateSource>(m, "EstimateSource")
        .value("FromSpeedup", EstimateSource::FromSpeedup)
        .value("FromEfficiency", EstimateSource::FromEfficiency);

    py::enum_<Trend>(m, "Trend")
        .value("Constant", Trend::Constant)
        .value("Increasing", Trend::Increasing)
        .value("Decreasing", Trend::Decreasing);

    py::class_<AlphaEstimate>(m, "AlphaEstimate")
        .def_readonly("label", &AlphaEstimate::label)
        .def_readonly("n", &AlphaEstimate::n)
        .def_readonly("alpha_eff", &AlphaEstimate::alpha_eff)
        .def_readonly("one_minus_alpha", &AlphaEstimate::one_minus_alpha)
        .def_readonly("source", &AlphaEstimate::source)
        .def_readonly("out_of_model", &AlphaEstimate::out_of_model)
        .def("valid", &AlphaEstimate::valid);

    py::class_<SeriesDiagnostic>(m, "SeriesDiagnostic")
        .def_readonly("mean_one_minus_alpha",
                      &SeriesDiagnostic::mean_one_minus_alpha)
        .def_readonly("relative_spread", &SeriesDiagnostic::relative_spread)
        .def_readonly("trend", &SeriesDiagnostic::trend)
        .def_readonly("trend_slope", &SeriesDiagnostic::trend_slope)
        .def_readonly("points_used", &SeriesDiagnostic::points_used)
        .def_readonly("excluded_out_of_model",
                      &SeriesDiagnostic::excluded_out_of_model)
        .def_readonly("excluded_zero", &SeriesDiagnostic::excluded_zero);

    py::class_<BackProjection>(m, "BackProjection")
        .def_readonly("efficiency_at_1", &BackProjection::efficiency_at_1)
        .def_readonly("foreign_fraction", &BackProjection::foreign_fraction)
        .def_readonly("alpha_fit", &BackProjection::alpha_fit)
        .def_readonly("artifact_detected",
                      &BackProjection::artifact_detected);

    m.attr("DEFAULT_SLOPE_THRESHOLD") = kDefaultSlopeThreshold;
    m.attr("DEFAULT_EFFICIENCY_FLOOR") = kDefaultEfficiencyFloor;

    m.def(
        "estimate_series",
        [](const std::vector<ScalingPoint>& points) {
            return estimate_series(points);
        },
        py::arg("points"));
    m.def(
        "diagnose_series",
        [](const std::vector<AlphaEstimate>& estimates,
           double slope_threshold) {
            return diagnose_series(estimates, slope_threshold);
        },
        py::arg("estimates"),
        py::arg("slope_threshold") = kDefaultSlopeThreshold);
    m.def(
        "back_project",
        [](const std::vector<ScalingPoint>& points, double efficiency_floor,
           double slope_threshold) {
            return back_project(points, efficiency_floor, slope_threshold);
        },
        py::arg("points"),
        py::arg("efficiency_floor") = kDefaultEfficiencyFloor,
        py::arg("slope_threshold") = kDefaultSlopeThreshold);

    py::class_<Topology> topology(m, "Topology");
    py::enum_<Topology::Kind>(topology, "Kind")
        .value("Uniform", Topology::Kind::Uniform)
        .value("Linear", Topology::Kind::Linear)
        .value("Clustered", Topology::Kind::Clustered);
    topology.def(py::init<>())
        .def_readwrite("kind", &Topology::kind)
        .def_readwrite("pd0", &Topology::pd0)
        .def_readwrite("slope", &Topology::slope)
        .def_readwrite("cluster_size", &Topology::cluster_size)
        .def_readwrite("intra_delay", &Topology::intra_delay)
        .def_readwrite("inter_delay", &Topology::inter_delay)
        .def_static("uniform", &Topology::uniform, py::arg("pd0"))
        .def_static("linear", &Topology::linear, py::arg("pd0"),
                    py::arg("slope"))
        .def_static("clustered", &Topology::clustered, py::arg("pd0"),
                    py::arg("cluster_size"), py::arg("intra_delay"),
                    py::arg("inter_delay"));

    py::class_<JitterSpec>(m, "JitterSpec")
        .def(py::init<>())
        .def_readwrite("width", &JitterSpec::width)
        .def_readwrite("seed", &JitterSpec::seed)
        .def("enabled", &JitterSpec::enabled)
        .def_static("off", &JitterSpec::off)
        .def_static("multiplicative", &JitterSpec::multiplicative,
                    py::arg("width"), py::arg("seed"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("seq_pre", &SimConfig::seq_pre)
        .def_readwrite("seq_post", &SimConfig::seq_post)
        .def_readwrite("dispatch_cost", &SimConfig::dispatch_cost)
        .def_readwrite("collect_cost", &SimConfig::collect_cost)
        .def_readwrite("payload_total", &SimConfig::payload_total)
        .def_readwrite("access_latency", &SimConfig::access_latency)
        .def_readwrite("topology", &SimConfig::topology)
        .def_readwrite("jitter", &SimConfig::jitter)
        .def_readwrite("host_computes_share",
                       &SimConfig::host_computes_share);

    py::class_<UnitTimeline>(m, "UnitTimeline")
        .def_readonly("unit", &UnitTimeline::unit)
        .def_readonly("start", &UnitTimeline::start)
        .def_readonly("compute", &UnitTimeline::compute)
        .def_readonly("return_arrival", &UnitTimeline::return_arrival);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("n", &RunResult::n)
        .def_readonly("total_time", &RunResult::total_time)
        .def_readonly("extended_time", &RunResult::extended_time)
        .def_readonly("unit_timelines", &RunResult::unit_timelines);

    py::enum_<TimingMode>(m, "TimingMode")
        .value("Total", TimingMode::Total)
        .value("Extended", TimingMode::Extended);

    m.def("nominal_single_time", &nominal_single_time, py::arg("config"));
    m.def("simulate_run", &simulate_run, py::arg("config"), py::arg("n"),
          py::arg("seed"));
    m.def(
        "simulate_sweep",
        [](const SimConfig& config, const std::vector<std::uint64_t>& n,
           std::uint32_t repetitions, std::uint64_t seed, TimingMode timing,
           const std::string& label) {
            return simulate_sweep(config, n, repetitions, seed, timing,
                                  label);
        },
        py::arg("config"), py::arg("n_values"), py::arg("repetitions") = 1,
        py::arg("seed") = 0, py::arg("timing") = TimingMode::Total,
        py::arg("label") = "sim");
    m.def(
        "simulate_efficiency_sweep",
        [](const SimConfig& config, const std::vector<std::uint64_t>& n,
           std::uint32_t repetitions, std::uint64_t seed, TimingMode timing,
           const std::string& label) {
            return simulate_efficiency_sweep(config, n, repetitions, seed,
                                             timing, label);
        },
        py::arg("config"), py::arg("n_values"), py::arg("repetitions") = 1,
        py::arg("seed") = 0, py::arg("timing") = TimingMode::Total,
        py::arg("label") = "sim");
    m.def(
        "parse_sim_config",
        [](const std::string& text) { return parse_sim_config(text); },
        py::arg("text"));
    m.def("write_sim_config", &write_sim_config, py::arg("config"));

    py::enum_<DatasetFormat>(m, "DatasetFormat")
        .value("TimingCsv", DatasetFormat::TimingCsv)
        .value("EfficiencyCsv", DatasetFormat::EfficiencyCsv)
        .value("Top500Csv", DatasetFormat::Top500Csv);

    m.def(
        "load_scaling_points",
        [](const std::string& text, DatasetFormat format) {
            return load_scaling_points(text, format);
        },
        py::arg("text"), py::arg("format"));
    m.def(
        "load_machine_records",
        [](const std::string& text) { return load_machine_records(text); },
        py::arg("text"));
    m.def(
        "write_scaling_points",
        [](const std::vector<ScalingPoint>& points, DatasetFormat format) {
            return write_scaling_points(points, format);
        },
        py::arg("points"), py::arg("format"));
    m.def(
        "write_machine_records",
        [](const std::vector<MachineRecord>& records) {
            return write_machine_records(records);
        },
        py::arg("records"));
    m.def("machine_to_point", &machine_to_point, py::arg("record"));

    py::class_<SurfaceSample>(m, "SurfaceSample")
        .def_readonly("n", &SurfaceSample::n)
        .def_readonly("alpha", &SurfaceSample::alpha)
        .def_readonly("efficiency", &SurfaceSample::efficiency);

    py::class_<PredictionPoint>(m, "PredictionPoint")
        .def_readonly("n", &PredictionPoint::n)
        .def_readonly("p", &PredictionPoint::p);

    py::class_<PredictionDiagram>(m, "PredictionDiagram")
        .def_readonly("alpha", &PredictionDiagram::alpha)
        .def_readonly("p_single", &PredictionDiagram::p_single)
        .def_readonly("snapshot", &PredictionDiagram::snapshot)
        .def_readonly("points", &PredictionDiagram::points);

    py::class_<Report>(m, "Report")
        .def(py::init<>())
        .def_readwrite("estimates", &Report::estimates)
        .def_readwrite("diagnostics", &Report::diagnostics)
        .def_readwrite("back_projection", &Report::back_projection)
        .def_readwrite("predictions", &Report::predictions);

    py::enum_<PlotTarget>(m, "PlotTarget")
        .value("PlotCsv", PlotTarget::PlotCsv)
        .value("VectorGraphic", PlotTarget::VectorGraphic);

    m.def(
        "efficiency_surface",
        [](const std::vector<std::uint64_t>& n_grid,
           const std::vector<double>& alpha_grid) {
            return efficiency_surface(n_grid, alpha_grid);
        },
        py::arg("n_grid"), py::arg("alpha_grid"));
    m.def(
        "predict_from_snapshot",
        [](const MachineRecord& record,
           const std::vector<std::uint64_t>& n_targets, double kappa,
           OverheadGrowth growth) {
            return predict_from_snapshot(record, n_targets, kappa, growth);
        },
        py::arg("record"), py::arg("n_targets"), py::arg("kappa") = 0.0,
        py::arg("growth") = OverheadGrowth::LinearInN);
    m.def("render_report", &render_report, py::arg("report"));
    m.def(
        "emit_plot",
        [](const std::vector<SurfaceSample>& surface, PlotTarget target) {
            return emit_plot(surface, target);
        },
        py::arg("surface"), py::arg("target"));
    m.def(
        "emit_plot",
        [](const std::vector<AlphaEstimate>& estimates, PlotTarget target) {
            return emit_plot(estimates, target);
        },
        py::arg("estimates"), py::arg("target"));
    m.def(
        "emit_plot",
        [](const PredictionDiagram& diagram, PlotTarget target) {
            return emit_plot(diagram, target);
        },
        py::arg("diagram"), py::arg("target"));
}
