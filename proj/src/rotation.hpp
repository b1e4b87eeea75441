#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

// Internal rotation conventions shared by the renderer and the drift
// correction. World is Z-up, X forward, Y leftward; the camera looks down.

namespace mlog::internal {

/// Camera axes at a level pose, columns = image x, image y, optical axis,
/// expressed in world coordinates (X_img = -Y_world, Y_img = -X_world).
inline Eigen::Matrix3d base_axes() {
  Eigen::Matrix3d base;
  base.col(0) = Eigen::Vector3d(0, -1, 0);
  base.col(1) = Eigen::Vector3d(-1, 0, 0);
  base.col(2) = Eigen::Vector3d(0, 0, -1);
  return base;
}

/// Yaw-pitch-roll body rotation. Positive roll tilts the camera view toward
/// +Y, positive pitch toward +X (hence the negated Y-axis rotation in this
/// Z-up frame).
inline Eigen::Matrix3d vehicle_rotation(double alpha, double beta, double gamma) {
  return (Eigen::AngleAxisd(gamma, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(-beta, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

/// Fixed camera-to-body mounting rotation from the per-axis tilts.
inline Eigen::Matrix3d mount_rotation(double toward_x, double toward_y) {
  return (Eigen::AngleAxisd(-toward_x, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(toward_y, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

} // namespace mlog::internal
