// svg.hpp — static SVG renderings of trajectory, ensemble, and scaling
// output. No plotting dependency; the files are plain hand-assembled XML.
#pragma once

#include <filesystem>
#include <vector>

#include "qpl/ensemble.hpp"
#include "qpl/sde.hpp"

namespace qpl {

// Two panels: atomic observables (Bell overlaps, parity variance) and the
// homodyne signal (conditional mean rate plus a 1-time-unit moving average of
// dY0/dt, with ±2α guides).
void write_trajectory_svg(const std::filesystem::path& path, const TrajectoryRecord& rec);

// Parity-variance mean line with ±1 std band on a log axis (floored at 1e−6);
// cross-driven stats add a residual-error band panel.
void write_ensemble_svg(const std::filesystem::path& path, const EnsembleStats& stats);

// Log–log discrepancy vs scale, one polyline per branch.
void write_scaling_svg(const std::filesystem::path& path, const std::vector<ScalingRow>& rows);

}  // namespace qpl
