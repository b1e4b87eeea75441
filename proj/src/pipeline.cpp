#include "mlog/pipeline.hpp"

#include <chrono>

#include "mlog/cluster.hpp"
#include "mlog/orientation.hpp"
#include "mlog/simulator.hpp" // mix_seed

namespace mlog {

const char* to_string(FrameStatus s) {
  switch (s) {
    case FrameStatus::Accepted: return "accepted";
    case FrameStatus::Partial: return "partial";
    case FrameStatus::Dropped: return "dropped";
  }
  return "unknown";
}

Pipeline::Pipeline(CameraModel cam, GridSpec grid, PipelineConfig cfg, std::uint64_t seed)
    : cam_(cam), grid_(grid), cfg_(cfg) {
  if (!cam_.valid()) throw std::invalid_argument("Pipeline: invalid camera model");
  if (!grid_.valid()) throw std::invalid_argument("Pipeline: invalid grid spec");
  if (!cfg_.valid()) throw std::invalid_argument("Pipeline: invalid config");
  state_.seed = seed;
}

FrameOutput Pipeline::process_frame(const FrameInput& input) {
  const auto t0 = std::chrono::steady_clock::now();
  FrameOutput out;
  out.diagnostics.n_input = int(input.lines.size());

  auto finish = [&](FrameOutput& o) -> FrameOutput& {
    o.diagnostics.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return o;
  };
  auto drop = [&](const std::string& reason) {
    out.status = FrameStatus::Dropped;
    out.pose = state_.last_pose; // held
    out.diagnostics.drop_reason = reason;
    ++state_.consecutive_drops;
    out.lost = state_.consecutive_drops >= cfg_.consecutive_drop_limit;
    return finish(out);
  };

  FilterError ferr = FilterError::NoConsensus;
  const auto filtered = filter_grid_lines(
      input.lines, cfg_, cam_, mix_seed(state_.seed, std::uint64_t(input.frame_index)),
      &ferr);
  if (!filtered) {
    switch (ferr) {
      case FilterError::TooFewLines: return drop("filter:too_few_lines");
      case FilterError::Degenerate: return drop("filter:degenerate");
      default: return drop("filter:no_consensus");
    }
  }
  out.diagnostics.n_gated = int(filtered->long_lines.size() + filtered->lat_lines.size() +
                                filtered->outliers.size());
  out.diagnostics.n_long = int(filtered->long_lines.size());
  out.diagnostics.n_lat = int(filtered->lat_lines.size());
  out.diagnostics.n_outliers = int(filtered->outliers.size());

  const ClusteredSet lat_clusters = cluster_rho(filtered->lat_lines, cfg_, cam_);
  const ClusteredSet long_clusters = cluster_rho(filtered->long_lines, cfg_, cam_);
  out.diagnostics.n_lat_clusters = int(lat_clusters.lines.size());
  out.diagnostics.n_long_clusters = int(long_clusters.lines.size());
  if (lat_clusters.lines.empty() && long_clusters.lines.empty())
    return drop("cluster:empty");

  const OrientationEstimate est =
      cfg_.fit_slopes_on_clusters
          ? estimate_orientation(lat_clusters.lines, long_clusters.lines, cam_)
          : estimate_orientation(filtered->lat_lines, filtered->long_lines, cam_);

  const LabeledSet labeled =
      drift_correct(lat_clusters, long_clusters, est, cam_, cfg_.drift_mode);

  const auto res_x = localize_axis(labeled.lat, Axis::X, cam_, grid_, state_.prev_x, cfg_);
  const auto res_y = localize_axis(labeled.longi, Axis::Y, cam_, grid_, state_.prev_y, cfg_);
  out.diagnostics.cost_x = res_x ? res_x->final_cost : 0.0;
  out.diagnostics.cost_y = res_y ? res_y->final_cost : 0.0;

  const bool xa = res_x && res_x->accepted;
  const bool ya = res_y && res_y->accepted;
  if (!xa && !ya) return drop("subcell:both_axes_rejected");

  const FusedResult fused = fuse_axes(res_x, res_y, state_.tracker.prev_o_x,
                                      state_.tracker.prev_o_y, state_.last_pose.h);
  state_.tracker = update(state_.tracker, fused, grid_);
  if (xa) state_.prev_x = res_x;
  if (ya) state_.prev_y = res_y;

  PoseEstimate pose;
  pose.x = state_.tracker.p_x(grid_);
  pose.y = state_.tracker.p_y(grid_);
  pose.o_x = fused.o_x;
  pose.o_y = fused.o_y;
  pose.h = fused.h;
  pose.alpha = est.alpha;
  pose.beta = est.beta;
  pose.final_cost_x = fused.cost_x;
  pose.final_cost_y = fused.cost_y;
  pose.accepted = true;

  state_.last_pose = pose;
  state_.consecutive_drops = 0;

  out.pose = pose;
  out.status = fused.partial ? FrameStatus::Partial : FrameStatus::Accepted;
  return finish(out);
}

} // namespace mlog
