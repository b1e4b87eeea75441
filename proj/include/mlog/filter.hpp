#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlog/types.hpp"

// Theta gating and double-RANSAC consensus: splits detected lines into the
// two sets of grid-parallel lines plus outliers.

namespace mlog {

/// Linear model rho = m * theta + intercept in rho-theta space. For a set
/// of parallel grid lines the (rho, theta) points are near collinear; the
/// model is fitted homogeneously internally, so near-vertical relationships
/// (all thetas equal) are representable; in that case `degenerate` is set
/// and slope/intercept hold a clamped finite stand-in.
struct LinearModelRT {
  double slope = 0.0;     ///< pixels per radian
  double intercept = 0.0; ///< pixels
  // Homogeneous form a*theta + b*rho_n + c = 0 with a^2+b^2 = 1 and rho_n =
  // rho / normalizer; this is what distances are measured against.
  double a = 0.0, b = 0.0, c = 0.0;
  double normalizer = 1.0; ///< rho scale (image diagonal), pixels
  bool degenerate = false;

  /// Distance of a point to the model in the normalized space.
  double distance(const DetectedLine& p) const {
    return std::abs(a * p.theta + b * (p.rho / normalizer) + c);
  }
};

struct FilterResult {
  std::vector<DetectedLine> long_lines; ///< mean theta near 0
  std::vector<DetectedLine> lat_lines;  ///< mean theta near pi/2
  std::vector<DetectedLine> outliers;
  LinearModelRT model_long;
  LinearModelRT model_lat;
};

enum class FilterError { TooFewLines, NoConsensus, Degenerate };

/// Keeps exactly the lines with -pi/4 <= theta < 3*pi/4. Removing the
/// complementary band removes the wrap-around discontinuity of the
/// rho-theta curve traced by a pencil of parallel lines.
std::vector<DetectedLine> theta_gate(std::span<const DetectedLine> lines);

struct RansacResult {
  LinearModelRT model;
  std::vector<DetectedLine> inliers;
  std::vector<DetectedLine> rest; ///< complement of inliers, input order
};

/// RANSAC with a 2-point line model over (theta, rho/normalizer) points.
/// A point is an inlier when its distance to the model is within `d`.
/// Asserts a fit only when at least `t` points agree; ties between equal
/// inlier counts break toward the smaller sum of squared residuals, then
/// the earlier sample. When the number of point pairs is within the
/// iteration budget every pair is tried, otherwise pairs are sampled with
/// the given seed. Returns FilterError::NoConsensus when no model reaches
/// `t` inliers, Degenerate when all points coincide.
std::optional<RansacResult> ransac_line_rt(std::span<const DetectedLine> points,
                                           double d, int t, int iterations,
                                           std::uint64_t seed, double normalizer,
                                           FilterError* error = nullptr,
                                           double early_exit_ratio = 0.8);

/// Gate then RANSAC twice without replacement. The consensus set whose mean
/// theta is nearer 0 becomes long_lines, the other lat_lines; the remainder
/// are outliers. Returns nullopt (with *error set) when either pass fails.
std::optional<FilterResult> filter_grid_lines(std::span<const DetectedLine> lines,
                                              const PipelineConfig& cfg,
                                              const CameraModel& cam,
                                              std::uint64_t seed,
                                              FilterError* error = nullptr);

} // namespace mlog
