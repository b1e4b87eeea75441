#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mlog/grid_model.hpp"
#include "mlog/types.hpp"

// Per-axis 1D localization: build the model residuals, run the bounded
// solver, gate the result on the final optimization energy, and fuse the
// two axes into a frame pose.

namespace mlog {

struct AxisResult {
  double o = 0.0;          ///< sub-cell offset, meters
  double h = 0.0;          ///< height, meters
  double final_cost = 0.0; ///< squared pixels
  bool accepted = false;
  bool degraded = false;   ///< single-line solve, h pinned to previous
  int n_lines = 0;
};

/// Energy floor so a perfect previous fit (cost 0) does not reject
/// subsequent perfect frames through the ratio gate.
constexpr double kEnergyFloor = 1e-9;

/// Solves one axis. `prev` carries the last accepted result for this axis
/// (initial guess, energy gate reference, pinned h for single-line frames).
/// Accepted iff the solver converged and final_cost < eps_E * max(prev cost,
/// floor). No lines -> nullopt. One line -> o-only solve flagged degraded.
std::optional<AxisResult> localize_axis(std::span<const LabeledLine> lines,
                                        Axis axis, const CameraModel& cam,
                                        const GridSpec& grid,
                                        const std::optional<AxisResult>& prev,
                                        const PipelineConfig& cfg);

struct FusedResult {
  double o_x = 0.0, o_y = 0.0;
  double h = 0.0;
  double cost_x = 0.0, cost_y = 0.0;
  bool x_accepted = false, y_accepted = false;
  bool partial = false; ///< exactly one axis accepted
};

/// Merges the two axis results. Offsets come from their own axes; h is the
/// line-count-weighted mean of the accepted axes' estimates. A rejected
/// axis keeps the caller's previous offset. Requires at least one accepted
/// axis (both rejected is handled upstream as a dropped frame).
FusedResult fuse_axes(const std::optional<AxisResult>& x,
                      const std::optional<AxisResult>& y,
                      double prev_o_x, double prev_o_y, double prev_h);

} // namespace mlog
