#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mlog/image.hpp"
#include "mlog/pipeline.hpp"
#include "mlog/types.hpp"

// Ground-truth oracle: renders rho-theta line observations from known
// camera poses over a synthetic grid by explicit 3D raycasting (independent
// of the grid-lines model used by the estimator), generates speed-limited
// trajectories, and calibrates the slope-to-angle constants.

namespace mlog {

struct TruePose {
  double x = 0.0, y = 0.0; ///< meters
  double h = 2.0;          ///< meters, > 0
  double alpha = 0.0;      ///< roll, radians; positive tilts the view toward +Y
  double beta = 0.0;       ///< pitch, radians; positive tilts the view toward +X
  double gamma = 0.0;      ///< yaw, radians; assumed near zero
};

/// Fixed camera mounting tilt relative to the vehicle, radians.
struct MountTilt {
  double toward_x = 0.0; ///< tilts the view toward +X (pitch-like)
  double toward_y = 0.0; ///< tilts the view toward +Y (roll-like)
};

struct NoiseSpec {
  double sigma_rho = 0.0;   ///< pixels
  double sigma_theta = 0.0; ///< radians
  int duplicates_min = 1, duplicates_max = 1; ///< detections per line
  int outliers_min = 0, outliers_max = 0;
  std::uint64_t seed = 0;
};

struct EmittedLine {
  DetectedLine line;       ///< as emitted (noisy, canonical form)
  bool outlier = false;
  Axis axis = Axis::Y;     ///< family: Y = longitudinal, X = latitudinal
  long world_index = 0;    ///< grid line index along the axis
  double exact_rho = 0.0;  ///< noise-free projection
  double exact_theta = 0.0;
};

struct RenderedFrame {
  FrameInput input;
  std::vector<EmittedLine> truth; ///< same order as input.lines
};

/// splitmix64 mix for deriving per-frame seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Projects every grid line visible from `pose` through an exact rotated
/// pinhole camera, emits the configured duplicates/jitter/outliers, and
/// returns the truth record for each emitted line. An empty frame (no line
/// visible) is not an error.
RenderedFrame render_frame(const TruePose& pose, const CameraModel& cam,
                           const GridSpec& grid, const NoiseSpec& noise,
                           const MountTilt& mount = {},
                           std::int64_t frame_index = 0);

/// Image-plane offset of a ground point at world-axis distance `s` from the
/// camera, measured from the image center along the ground-parallel
/// direction of the image plane, for a camera tilted by eps_c about the
/// orthogonal floor axis. Used as the independent oracle for the projection
/// model; computed purely from ray/plane intersections.
double raycast_center_offset(double s, double h, double f, double eps_c);

/// Rasterizes the visible grid lines into an image (dark lines on a light
/// background) for exercising the image-based detector.
GrayImage render_grid_image(const TruePose& pose, const CameraModel& cam,
                            const GridSpec& grid, const MountTilt& mount = {},
                            double half_thickness = 1.0);

struct TrajectoryOptions {
  double speed = 1.0;        ///< meters/second along the path
  double fps = 30.0;
  int eps_s = 3;             ///< speed-limit factor used for the guard
  bool force_overspeed = false;
  double max_tilt = deg2rad(10.0);   ///< roll/pitch excursion bound
  double spike_tilt = deg2rad(35.0); ///< amplitude of rare attitude spikes
  double spike_prob = 0.0;           ///< per-frame probability of starting a spike
  double start_height = 2.0;         ///< meters
  double height_amplitude = 0.0;     ///< meters, slow sinusoidal variation
  double height_period = 20.0;       ///< seconds
  double yaw_amplitude = 0.0;        ///< radians, perturbation only
  std::uint64_t seed = 0;
};

/// Constant-speed piecewise-linear trajectory through `waypoints`, sampled
/// at fps, with smooth roll/pitch excursions proportional to the path
/// acceleration. Throws std::invalid_argument when speed exceeds
/// max_speed(grid, fps, eps_s) and force_overspeed is not set.
std::vector<TruePose> gen_trajectory(const std::vector<std::array<double, 2>>& waypoints,
                                     const GridSpec& grid,
                                     const TrajectoryOptions& opts);

/// Seeded random waypoints inside [margin, arena-margin]^2 accumulating to
/// the requested path length; the last segment is trimmed to land on the
/// target exactly.
std::vector<std::array<double, 2>> random_waypoints(double arena, double target_length,
                                                    std::uint64_t seed,
                                                    double margin = 0.5);

struct CalibrationResult {
  double eps_alpha = 1.0;
  double eps_beta = 1.0;
  double eps_c_alpha = 0.0;
  double eps_c_beta = 0.0;
  double resid_sd_alpha = 0.0; ///< radians
  double resid_sd_beta = 0.0;  ///< radians

  /// The input camera with the calibrated constants filled in.
  CameraModel apply(CameraModel cam) const;
};

/// Renders noiseless frames at each (alpha, beta) sweep pose, measures the
/// fitted slopes through the production slope estimator, and regresses
/// atan(slope) against the true angles, one linear fit per axis. Requires
/// at least 5 distinct sweep values per axis.
CalibrationResult calibrate_constants(const CameraModel& cam, const GridSpec& grid,
                                      const std::vector<std::array<double, 2>>& sweep,
                                      const MountTilt& mount = {});

} // namespace mlog
