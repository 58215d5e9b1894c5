#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parscale/estimator.hpp"
#include "parscale/types.hpp"

namespace parscale {

/// One cell of the efficiency landscape over (alpha, N).
struct SurfaceSample {
    std::uint64_t n = 1;
    double alpha = 1.0;
    double efficiency = 1.0;
};

/// Strong-scaling efficiency over the grid, row-major with alpha as the
/// outer dimension, so each alpha forms one contiguous curve.
std::vector<SurfaceSample> efficiency_surface(
    std::span<const std::uint64_t> n_grid, std::span<const double> alpha_grid);

struct PredictionPoint {
    std::uint64_t n = 1;
    double p = 0.0;  ///< payload performance, same unit as p_single
};

/// Payload-performance extrapolation anchored to one machine snapshot.
struct PredictionDiagram {
    double alpha = 1.0;     ///< fitted to the snapshot's rmax/rpeak
    double p_single = 0.0;  ///< rpeak / cores
    MachineRecord snapshot;
    std::vector<PredictionPoint> points;
};

/// Fit alpha to the snapshot's efficiency and extrapolate payload
/// performance to the target counts. kappa > 0 switches to the second-order
/// law with the fitted alpha as its base. With kappa == 0 the diagram
/// reproduces the snapshot: the point at N = cores equals rmax. Throws
/// SingularityError for a single-core snapshot and OutOfModelError when the
/// snapshot efficiency is below 1/cores (worse than serial execution).
PredictionDiagram predict_from_snapshot(
    const MachineRecord& record, std::span<const std::uint64_t> n_targets,
    double kappa = 0.0, OverheadGrowth growth = OverheadGrowth::LinearInN);

/// Aggregated analysis output; any subset of sections may be present.
struct Report {
    std::vector<AlphaEstimate> estimates;
    std::optional<SeriesDiagnostic> diagnostics;
    std::optional<BackProjection> back_projection;
    std::vector<PredictionDiagram> predictions;
};

/// Render the report as JSON with fixed key order and numbers at 12
/// significant digits, so equal reports are byte-identical on every
/// platform. NaN values (singular estimates) become null.
std::string render_report(const Report& report);

enum class PlotTarget {
    PlotCsv,       ///< series,x,y rows; re-ingestable where schema-compatible
    VectorGraphic  ///< standalone SVG
};

/// Efficiency surface plot: one series per alpha, N on a log axis.
std::string emit_plot(std::span<const SurfaceSample> surface,
                      PlotTarget target);

/// Sequential-fraction plot: 1 - alpha_eff per series label, log value axis.
/// Flagged estimates carry no drawable value and are skipped.
std::string emit_plot(std::span<const AlphaEstimate> estimates,
                      PlotTarget target);

/// Prediction plot: the extrapolated curve plus the snapshot point, both
/// axes logarithmic.
std::string emit_plot(const PredictionDiagram& diagram, PlotTarget target);

}  // namespace parscale
