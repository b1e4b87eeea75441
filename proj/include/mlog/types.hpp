#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

// Shared domain types and conventions.
//
// Frames:
//  - World: right handed, Z up, X forward, Y leftward. The floor is the
//    Z=0 plane covered by two orthogonal families of equally spaced lines:
//    longitudinal lines run along X at Y = k*m_y, latitudinal lines run
//    along Y at X = k*m_x.
//  - Image: origin at the top-left corner, x to the right, y down. For a
//    level downward-facing camera the axes relate as X_img = -Y_world,
//    Y_img = -X_world.
//  - Angles are radians everywhere inside the library; degrees appear only
//    in CLI/report output.

namespace mlog {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// A detected line in rho-theta (Hough) space. rho is the perpendicular
/// distance in pixels from the image origin, theta the angle of the line
/// normal with the image x axis (0 ~ vertical line, pi/2 ~ horizontal).
/// At detection time rho >= 0 and -pi <= theta < pi; after drift
/// correction rho may take any real value.
struct DetectedLine {
  double rho = 0.0;
  double theta = 0.0;
};

/// A drift-corrected line carrying its integer grid label.
struct LabeledLine {
  double rho_c = 0.0;   ///< corrected rho, pixels (any real)
  double theta_c = 0.0; ///< corrected theta, radians
  int label = 0;
};

enum class Axis { X, Y };

/// Pinhole camera intrinsics plus the slope-to-angle calibration constants.
/// eps_alpha/eps_beta are the gains and eps_c_alpha/eps_c_beta the offsets
/// of the linear maps from fitted rho-theta slopes to roll/pitch; both are
/// produced by calibration against ground truth.
struct CameraModel {
  double f = 600.0;      ///< focal length, pixels
  int width = 640;
  int height = 480;
  double cx = 320.0;     ///< image center, pixels (I_X)
  double cy = 240.0;     ///< image center, pixels (I_Y)
  double eps_c_alpha = 0.0; ///< roll offset, radians
  double eps_c_beta = 0.0;  ///< pitch offset, radians
  double eps_alpha = 1.0;   ///< roll gain
  double eps_beta = 1.0;    ///< pitch gain

  bool valid() const {
    return f > 0.0 && width > 0 && height > 0 && cx >= 0.0 &&
           cx <= width && cy >= 0.0 && cy <= height;
  }
  double diagonal() const { return std::hypot(double(width), double(height)); }
};

/// Unit-cell dimensions of the grid floor, meters.
struct GridSpec {
  double m_x = 1.0;
  double m_y = 1.0;

  bool valid() const { return m_x > 0.0 && m_y > 0.0; }
};

/// How estimated roll/pitch are compensated in the detected lines before
/// model fitting. `Shift` moves every line by tan(angle)*f pixels along
/// the image axes; `Homography` reprojects each line through the inverse
/// camera rotation (exact at any angle, equal to Shift to first order).
enum class DriftMode { Shift, Homography };

/// Tunable thresholds. Defaults follow the reference constant table.
struct PipelineConfig {
  double ransac_width_d = 0.1;        ///< inlier width, normalized rho-theta space
  int ransac_min_inliers_t = 10;      ///< minimum consensus to assert a fit
  double kde_bandwidth_b = 20.0;      ///< KDE bandwidth, pixels (at 640x480)
  double cluster_threshold_fraction = 0.25; ///< eps_c = fraction * max density
  double energy_ratio_eps_e = 1.0e2;  ///< energy gate ratio
  int speed_factor_eps_s = 3;         ///< min frames per traversed cell, >= 3

  // Knobs the reference leaves unspecified; exposed so behavior can be
  // matched if the original values are ever discovered.
  int ransac_iterations = 200;
  double ransac_early_exit_ratio = 0.8;
  DriftMode drift_mode = DriftMode::Homography;
  bool fit_slopes_on_clusters = false; ///< fit slopes on cluster means instead of inliers
  int consecutive_drop_limit = 15;     ///< frames before the tracker flags LOST
  double nominal_height = 2.0;         ///< solver fallback height, meters
  double min_height = 0.2;             ///< solver lower bound on h, meters
  double max_height = 50.0;            ///< solver upper bound on h, meters

  bool valid() const {
    return ransac_width_d > 0.0 && ransac_min_inliers_t > 0 &&
           kde_bandwidth_b > 0.0 && cluster_threshold_fraction > 0.0 &&
           energy_ratio_eps_e > 0.0 && speed_factor_eps_s >= 3;
  }
};

/// Per-frame 5-DoF output. x/y are the integrated grid position, o_x/o_y
/// the sub-cell offsets in [0, m), h the height, alpha/beta roll and pitch.
struct PoseEstimate {
  double x = 0.0;
  double y = 0.0;
  double o_x = 0.0;
  double o_y = 0.0;
  double h = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double final_cost_x = 0.0;
  double final_cost_y = 0.0;
  bool accepted = false;
};

/// Maximum speed, meters/second, at which the tracker's one-cell candidate
/// set stays unambiguous: min(m_x, m_y) * fps / eps_s.
/// Throws std::invalid_argument for eps_s < 3 or fps <= 0.
double max_speed(const GridSpec& grid, double fps, int eps_s);

} // namespace mlog
