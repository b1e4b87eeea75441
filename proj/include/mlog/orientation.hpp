#pragma once

#include <span>
#include <vector>

#include "mlog/cluster.hpp"
#include "mlog/types.hpp"

// Roll/pitch estimation from the rho-theta slopes of the two parallel sets,
// drift correction of the induced line displacement, and grid labeling.

namespace mlog {

struct OrientationEstimate {
  double alpha = 0.0; ///< roll, radians
  double beta = 0.0;  ///< pitch, radians
  double m_lat = 0.0;  ///< fitted slope of the latitudinal set, pixels/radian
  double m_long = 0.0; ///< fitted slope of the longitudinal set, pixels/radian
  bool low_confidence = false; ///< set when a slope was unobservable
};

struct LabeledSet {
  std::vector<LabeledLine> lat;  ///< sorted descending by rho_c
  std::vector<LabeledLine> longi; ///< sorted descending by rho_c
  double x_drift = 0.0; ///< pixels, shift applied along image x
  double y_drift = 0.0; ///< pixels, shift applied along image y
};

/// Least-squares slope of the rho-theta relationship of one parallel set,
/// returned as d(theta)/d(rho) over center-referenced rho (radians/pixel).
/// This orientation of the fit stays finite and linear through level
/// attitude, where rho-on-theta blows up. Returns 0 with *observable=false
/// for fewer than 2 points or zero rho variance.
double fit_theta_rho_slope(std::span<const DetectedLine> points,
                           const CameraModel& cam, bool* observable = nullptr);

/// Roll and pitch from the two sets' slopes through the calibrated linear
/// maps: alpha = eps_alpha * atan(slope_lat) + eps_c_alpha and likewise for
/// beta from the longitudinal set. The reported m_lat/m_long fields carry
/// the conventional pixels-per-radian slope (the reciprocal of the fitted
/// one, clamped when near level).
OrientationEstimate estimate_orientation(std::span<const DetectedLine> lat,
                                         std::span<const DetectedLine> longi,
                                         const CameraModel& cam);

/// Removes the roll/pitch-induced displacement of the detected lines and
/// assigns grid labels.
///
/// Shift mode moves every line by (x_drift, y_drift) = (tan(alpha),
/// tan(beta)) * f pixels, entering rho as rho' = rho - (x_drift cos theta +
/// y_drift sin theta); the x term acts on near-vertical (longitudinal)
/// lines and the y term on near-horizontal (latitudinal) ones. Homography
/// mode reprojects each line through the inverse of the estimated camera
/// rotation, which equals the shift to first order and is exact at any
/// angle.
///
/// Labels increase with the world axis (X for lat, Y for long),
/// consecutive within each set. Label 0 goes to the nearest line on the
/// negative axis side of the image center; when no such line is visible
/// labels start at 1.
LabeledSet drift_correct(const ClusteredSet& lat, const ClusteredSet& longi,
                         const OrientationEstimate& est, const CameraModel& cam,
                         DriftMode mode = DriftMode::Homography);

/// Signed distance of a line from the image center, measured along the
/// image direction of the growing world axis (leftward for longitudinal
/// lines, upward for latitudinal ones): d = (cx cos theta + cy sin theta) - rho.
double signed_center_distance(double rho, double theta, const CameraModel& cam);

} // namespace mlog
