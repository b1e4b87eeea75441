#pragma once

#include <cstdint>
#include <string>

#include "mlog/simulator.hpp"
#include "mlog/types.hpp"

// JSON configuration covering the pipeline thresholds, camera, grid and
// simulation settings. Every field is optional and falls back to the
// defaults of the corresponding struct.

namespace mlog {

struct SimulationConfig {
  double fps = 30.0;
  std::uint64_t seed = 42;
  NoiseSpec noise;
  MountTilt mount;
  TrajectoryOptions trajectory; ///< fps/seed above take precedence
  double arena = 10.0;          ///< meters, square
  double target_length = 0.0;   ///< meters; > 0 selects random waypoints
  std::vector<std::array<double, 2>> waypoints; ///< used when target_length == 0
  bool auto_calibrate = true;   ///< run calibrate_constants and bake the result
};

struct Config {
  PipelineConfig pipeline;
  CameraModel camera;
  GridSpec grid;
  SimulationConfig simulation;
};

/// Parses a config JSON string. Unknown keys and type mismatches are
/// reported with their field path in std::runtime_error.
Config parse_config(const std::string& json_text);

/// Loads a config file; missing file -> defaults only if `path` is empty,
/// otherwise std::runtime_error.
Config load_config(const std::string& path);

/// Serializes the effective config (stable key order, round-trips through
/// parse_config).
std::string config_to_json(const Config& cfg);

/// Named presets mirroring the three trial path lengths (264.60 m,
/// 639.34 m, 1020.73 m) plus noiseless variants. Throws on unknown name.
Config preset_config(const std::string& name);

/// Lists available preset names.
std::vector<std::string> preset_names();

} // namespace mlog
