#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlog/filter.hpp"
#include "mlog/subcell.hpp"
#include "mlog/tracker.hpp"
#include "mlog/types.hpp"

// Per-frame orchestration: lines -> filter -> cluster -> orientation ->
// drift/label -> sub-cell solve -> tracker. Owns the drop/hold policy: a
// failed stage drops the frame and leaves all state untouched.

namespace mlog {

struct FrameInput {
  std::int64_t frame_index = 0;
  std::vector<DetectedLine> lines;
  std::optional<double> timestamp; ///< seconds
};

enum class FrameStatus { Accepted, Partial, Dropped };

const char* to_string(FrameStatus s);

struct StageDiagnostics {
  int n_input = 0;
  int n_gated = 0;
  int n_long = 0, n_lat = 0, n_outliers = 0;
  int n_long_clusters = 0, n_lat_clusters = 0;
  double cost_x = 0.0, cost_y = 0.0;
  std::string drop_reason; ///< empty unless dropped
  double wall_ms = 0.0;
};

struct FrameOutput {
  PoseEstimate pose; ///< held at the last accepted pose when dropped
  FrameStatus status = FrameStatus::Dropped;
  StageDiagnostics diagnostics;
  bool lost = false; ///< too many consecutive drops
};

struct PipelineState {
  TrackerState tracker;
  std::optional<AxisResult> prev_x;
  std::optional<AxisResult> prev_y;
  PoseEstimate last_pose;
  int consecutive_drops = 0;
  std::uint64_t seed = 0; ///< base seed; per-frame RANSAC seeds derive from it
};

class Pipeline {
 public:
  Pipeline(CameraModel cam, GridSpec grid, PipelineConfig cfg, std::uint64_t seed = 0);

  /// Processes one frame; mutates internal state only on accepted/partial
  /// frames (the drop counter aside). Never throws on bad frame content.
  FrameOutput process_frame(const FrameInput& input);

  const PipelineState& state() const { return state_; }
  const CameraModel& camera() const { return cam_; }
  const GridSpec& grid() const { return grid_; }
  const PipelineConfig& config() const { return cfg_; }

 private:
  CameraModel cam_;
  GridSpec grid_;
  PipelineConfig cfg_;
  PipelineState state_;
};

} // namespace mlog
