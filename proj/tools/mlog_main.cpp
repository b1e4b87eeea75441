// mlog command line: simulate grid-line observations, detect lines in
// images, localize a line stream, and evaluate a trajectory against truth.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlog/config.hpp"
#include "mlog/detect.hpp"
#include "mlog/io.hpp"
#include "mlog/metrics.hpp"
#include "mlog/pipeline.hpp"
#include "mlog/simulator.hpp"

namespace fs = std::filesystem;
using namespace mlog;

namespace {

Config resolve_config(const std::string& config_path, const std::string& preset,
                      std::optional<std::uint64_t> seed_override) {
  Config cfg;
  if (!preset.empty() && !config_path.empty())
    throw std::runtime_error("pass either --config or --preset, not both");
  if (!preset.empty())
    cfg = preset_config(preset);
  else
    cfg = load_config(config_path);
  if (seed_override) {
    cfg.simulation.seed = *seed_override;
    cfg.simulation.trajectory.seed = *seed_override;
    cfg.simulation.noise.seed = *seed_override;
  }
  return cfg;
}

std::vector<std::array<double, 2>> resolve_waypoints(const Config& cfg) {
  if (!cfg.simulation.waypoints.empty()) return cfg.simulation.waypoints;
  const double length =
      cfg.simulation.target_length > 0.0 ? cfg.simulation.target_length : 50.0;
  return random_waypoints(cfg.simulation.arena, length, cfg.simulation.seed);
}

int cmd_simulate(const std::string& config_path, const std::string& preset,
                 std::optional<std::uint64_t> seed, const std::string& output,
                 bool force) {
  Config cfg = resolve_config(config_path, preset, seed);
  if (force) cfg.simulation.trajectory.force_overspeed = true;
  fs::create_directories(output);

  if (cfg.simulation.auto_calibrate) {
    std::vector<std::array<double, 2>> sweep;
    const double span = std::max(deg2rad(2.0), 1.5 * cfg.simulation.trajectory.max_tilt);
    for (int k = -4; k <= 4; ++k) {
      sweep.push_back({span * k / 4.0, 0.0});
      sweep.push_back({0.0, span * k / 4.0});
    }
    const CalibrationResult cal =
        calibrate_constants(cfg.camera, cfg.grid, sweep, cfg.simulation.mount);
    cfg.camera = cal.apply(cfg.camera);
  }

  const auto waypoints = resolve_waypoints(cfg);
  const auto poses = gen_trajectory(waypoints, cfg.grid, cfg.simulation.trajectory);

  std::vector<FrameInput> frames;
  std::vector<TrajectoryRecord> truth;
  frames.reserve(poses.size());
  truth.reserve(poses.size());
  for (std::size_t k = 0; k < poses.size(); ++k) {
    RenderedFrame rf = render_frame(poses[k], cfg.camera, cfg.grid,
                                    cfg.simulation.noise, cfg.simulation.mount,
                                    std::int64_t(k));
    rf.input.timestamp = double(k) / cfg.simulation.fps;
    frames.push_back(std::move(rf.input));
    truth.push_back({std::int64_t(k), poses[k].x, poses[k].y, poses[k].h,
                     rad2deg(poses[k].alpha), rad2deg(poses[k].beta), "truth"});
  }

  write_line_stream(frames, (fs::path(output) / "lines.jsonl").string());
  write_trajectory_csv(truth, (fs::path(output) / "truth.csv").string());
  std::ofstream cfg_out(fs::path(output) / "config.json");
  cfg_out << config_to_json(cfg) << "\n";

  std::cout << "simulate: " << frames.size() << " frames -> " << output << "\n";
  return 0;
}

int cmd_detect(const std::string& image_path, const std::string& output,
               double edge_threshold, double rho_step, double theta_step_deg,
               int votes_min) {
  const GrayImage img = read_pgm(image_path);
  const GrayImage edges = detect_edges(img, edge_threshold);
  HoughParams params;
  params.rho_step = rho_step;
  params.theta_step = deg2rad(theta_step_deg);
  params.votes_min = votes_min;
  const auto lines = hough_lines(edges, params);

  FrameInput frame;
  frame.frame_index = 0;
  frame.lines = lines;
  write_line_stream({frame}, output);
  std::cout << "detect: " << lines.size() << " lines -> " << output << "\n";
  return 0;
}

int cmd_localize(const std::string& lines_path, const std::string& config_path,
                 const std::string& preset, std::optional<std::uint64_t> seed,
                 const std::string& output) {
  const Config cfg = resolve_config(config_path, preset, seed);
  const auto frames = read_line_stream(lines_path);
  fs::create_directories(output);

  Pipeline pipeline(cfg.camera, cfg.grid, cfg.pipeline, cfg.simulation.seed);
  std::vector<TrajectoryRecord> rows;
  rows.reserve(frames.size());
  std::map<std::string, int> drop_reasons;
  std::vector<double> timings;
  timings.reserve(frames.size());
  int n_lost = 0;

  for (const auto& frame : frames) {
    const FrameOutput out = pipeline.process_frame(frame);
    rows.push_back({frame.frame_index, out.pose.x, out.pose.y, out.pose.h,
                    rad2deg(out.pose.alpha), rad2deg(out.pose.beta),
                    to_string(out.status)});
    if (out.status == FrameStatus::Dropped) ++drop_reasons[out.diagnostics.drop_reason];
    if (out.lost) ++n_lost;
    timings.push_back(out.diagnostics.wall_ms);
  }

  write_trajectory_csv(rows, (fs::path(output) / "trajectory.csv").string());

  nlohmann::ordered_json diag;
  diag["n_frames"] = frames.size();
  diag["n_dropped"] = [&] {
    int n = 0;
    for (const auto& [k, v] : drop_reasons) n += v;
    return n;
  }();
  diag["n_lost_frames"] = n_lost;
  diag["drop_reasons"] = drop_reasons;
  if (!timings.empty()) {
    std::vector<double> sorted = timings;
    std::sort(sorted.begin(), sorted.end());
    diag["timing_ms"] = {
        {"p50", sorted[sorted.size() / 2]},
        {"p99", sorted[std::min(sorted.size() - 1, sorted.size() * 99 / 100)]},
        {"max", sorted.back()}};
  }
  std::ofstream diag_out(fs::path(output) / "diagnostics.json");
  diag_out << diag.dump(2) << "\n";

  std::cout << "localize: " << rows.size() << " frames, " << diag["n_dropped"]
            << " dropped -> " << output << "\n";
  return 0;
}

int cmd_eval(const std::string& trajectory_path, const std::string& truth_path,
             const std::string& output) {
  const auto estimate = read_trajectory_csv(trajectory_path);
  const auto truth = read_trajectory_csv(truth_path);
  if (estimate.size() != truth.size())
    throw std::runtime_error("eval: frame count mismatch: trajectory has " +
                             std::to_string(estimate.size()) + " rows, truth has " +
                             std::to_string(truth.size()));
  const ErrorReport report =
      compute_report(to_pose_samples(estimate), to_pose_samples(truth));

  fs::create_directories(output);
  std::ofstream rep_out(fs::path(output) / "report.json");
  rep_out << report_to_json(report) << "\n";
  write_aligned_csv(estimate, truth, (fs::path(output) / "aligned.csv").string());

  std::cout << "eval: " << report.n_frames << " frames\n";
  for (std::size_t s = 0; s < 5; ++s) {
    std::cout << "  " << kStateNames[s] << ": mean " << report.mean[s] << ", rmse "
              << report.rmse[s] << ", sd " << report.sd[s] << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"monocular 5-DoF localization over a grid floor"};
  app.require_subcommand(1);

  std::string config_path, preset, output = "out";
  std::optional<std::uint64_t> seed;
  bool force = false;

  auto add_common = [&](CLI::App* cmd, bool with_force = false) {
    cmd->add_option("--config", config_path, "config JSON path");
    cmd->add_option("--preset", preset, "named preset")
        ->check(CLI::IsMember(preset_names()));
    cmd->add_option("--seed", seed, "seed override");
    cmd->add_option("--output", output, "output directory");
    if (with_force) cmd->add_flag("--force", force, "allow overspeed trajectories");
  };

  auto* sim = app.add_subcommand("simulate", "render a line stream and ground truth");
  add_common(sim, true);

  auto* det = app.add_subcommand("detect", "detect lines in a PGM image");
  std::string image_path, detect_out = "lines.jsonl";
  double edge_threshold = 20.0, rho_step = 1.0, theta_step_deg = 1.0;
  int votes_min = 80;
  det->add_option("--image", image_path, "input PGM (P5)")->required();
  det->add_option("--output", detect_out, "output JSONL path");
  det->add_option("--edge-threshold", edge_threshold, "gradient threshold");
  det->add_option("--rho-step", rho_step, "accumulator rho step, pixels");
  det->add_option("--theta-step-deg", theta_step_deg, "accumulator theta step, degrees");
  det->add_option("--votes-min", votes_min, "minimum votes per peak");

  auto* loc = app.add_subcommand("localize", "run the pipeline over a line stream");
  std::string lines_path;
  loc->add_option("--lines", lines_path, "input JSONL line stream")->required();
  add_common(loc);

  auto* ev = app.add_subcommand("eval", "error statistics against ground truth");
  std::string trajectory_path, truth_path;
  ev->add_option("--trajectory", trajectory_path, "estimated trajectory CSV")->required();
  ev->add_option("--truth", truth_path, "ground truth CSV")->required();
  ev->add_option("--output", output, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, preset, seed, output, force);
    if (det->parsed())
      return cmd_detect(image_path, detect_out, edge_threshold, rho_step,
                        theta_step_deg, votes_min);
    if (loc->parsed()) return cmd_localize(lines_path, config_path, preset, seed, output);
    if (ev->parsed()) return cmd_eval(trajectory_path, truth_path, output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
