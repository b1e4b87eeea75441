#include "mlog/orientation.hpp"

#include <algorithm>
#include <cmath>

#include "rotation.hpp"

namespace mlog {

using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

double signed_center_distance(double rho, double theta, const CameraModel& cam) {
  return cam.cx * std::cos(theta) + cam.cy * std::sin(theta) - rho;
}

double fit_theta_rho_slope(std::span<const DetectedLine> points,
                           const CameraModel& cam, bool* observable) {
  if (observable) *observable = false;
  if (points.size() < 2) return 0.0;
  // Center-referenced rho keeps the fit linear in the tilt angle; the
  // offset of the raw rho origin would otherwise bend the relationship.
  double mx = 0.0, my = 0.0;
  std::vector<double> xs(points.size()), ys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs[i] = points[i].rho -
            (cam.cx * std::cos(points[i].theta) + cam.cy * std::sin(points[i].theta));
    ys[i] = points[i].theta;
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(points.size());
  my /= double(points.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx < 1e-12) return 0.0; // all one line; slope unobservable
  if (observable) *observable = true;
  return sxy / sxx;
}

OrientationEstimate estimate_orientation(std::span<const DetectedLine> lat,
                                         std::span<const DetectedLine> longi,
                                         const CameraModel& cam) {
  OrientationEstimate est;
  bool obs_lat = false, obs_long = false;
  const double slope_lat = fit_theta_rho_slope(lat, cam, &obs_lat);
  const double slope_long = fit_theta_rho_slope(longi, cam, &obs_long);

  est.alpha = cam.eps_alpha * std::atan(slope_lat) + cam.eps_c_alpha;
  est.beta = cam.eps_beta * std::atan(slope_long) + cam.eps_c_beta;
  est.low_confidence = !obs_lat || !obs_long;

  // Reported in the conventional pixels-per-radian orientation; 0 when the
  // relationship is level/unobservable.
  est.m_lat = std::abs(slope_lat) > 1e-15 ? 1.0 / slope_lat : 0.0;
  est.m_long = std::abs(slope_long) > 1e-15 ? 1.0 / slope_long : 0.0;
  return est;
}

namespace {

struct CorrectionContext {
  bool homography = false;
  Matrix3d actual;    // estimated camera axes (attitude plus mount)
  Matrix3d reference; // mount-only camera axes
  double x_drift = 0.0;
  double y_drift = 0.0;
};

DetectedLine correct_line(const DetectedLine& l, const CameraModel& cam,
                          const CorrectionContext& ctx) {
  if (!ctx.homography) {
    // First-order correction: shift the line by (x_drift, y_drift) pixels.
    // Translating a line changes rho by the shift projected on its normal.
    return {l.rho - (ctx.x_drift * std::cos(l.theta) + ctx.y_drift * std::sin(l.theta)),
            l.theta};
  }
  // Exact correction: reproject two points of the line through the inverse
  // of the estimated rotation into the mount-only reference camera.
  const double c = std::cos(l.theta), s = std::sin(l.theta);
  const Vector2d foot(l.rho * c, l.rho * s);
  const Vector2d dir(-s, c);
  const double span = 0.25 * (cam.width + cam.height);
  Vector2d corrected[2];
  for (int k = 0; k < 2; ++k) {
    const Vector2d p = foot + (k == 0 ? -span : span) * dir;
    const Vector3d ray_cam((p.x() - cam.cx) / cam.f, (p.y() - cam.cy) / cam.f, 1.0);
    const Vector3d ray_world = ctx.actual * ray_cam;
    const Vector3d ray_ref = ctx.reference.transpose() * ray_world;
    if (ray_ref.z() < 1e-9) {
      // Ray swings past the reference horizon; fall back to the shift form.
      return {l.rho - (ctx.x_drift * c + ctx.y_drift * s), l.theta};
    }
    corrected[k] = Vector2d(cam.f * ray_ref.x() / ray_ref.z() + cam.cx,
                            cam.f * ray_ref.y() / ray_ref.z() + cam.cy);
  }
  const Vector2d d = corrected[1] - corrected[0];
  const double len = d.norm();
  if (len < 1e-9)
    return {l.rho - (ctx.x_drift * c + ctx.y_drift * s), l.theta};
  // Normal oriented consistently with the input line to keep theta stable
  // (rho is allowed to go negative rather than flipping the normal).
  Vector2d normal(-d.y() / len, d.x() / len);
  if (normal.x() * c + normal.y() * s < 0.0) normal = -normal;
  const double rho_c = normal.dot(corrected[0]);
  return {rho_c, std::atan2(normal.y(), normal.x())};
}

std::vector<LabeledLine> label_set(std::vector<DetectedLine> corrected,
                                   const CameraModel& cam) {
  // Ascending signed center distance == ascending world axis.
  std::vector<std::pair<double, DetectedLine>> by_d;
  by_d.reserve(corrected.size());
  for (const auto& l : corrected)
    by_d.emplace_back(signed_center_distance(l.rho, l.theta, cam), l);
  std::sort(by_d.begin(), by_d.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Label 0 anchors on the nearest line on the negative side of the image
  // center; with none visible the labels start at 1.
  int anchor = -1;
  for (std::size_t i = 0; i < by_d.size(); ++i)
    if (by_d[i].first < 1e-9) anchor = int(i);
  const int offset = anchor >= 0 ? -anchor : 1;

  std::vector<LabeledLine> out;
  out.reserve(by_d.size());
  for (std::size_t i = 0; i < by_d.size(); ++i)
    out.push_back({by_d[i].second.rho, by_d[i].second.theta, int(i) + offset});
  std::sort(out.begin(), out.end(),
            [](const LabeledLine& a, const LabeledLine& b) { return a.rho_c > b.rho_c; });
  return out;
}

} // namespace

LabeledSet drift_correct(const ClusteredSet& lat, const ClusteredSet& longi,
                         const OrientationEstimate& est, const CameraModel& cam,
                         DriftMode mode) {
  CorrectionContext ctx;
  ctx.x_drift = std::tan(est.alpha) * cam.f;
  ctx.y_drift = std::tan(est.beta) * cam.f;
  if (mode == DriftMode::Homography) {
    ctx.homography = true;
    const Matrix3d mount =
        internal::mount_rotation(-cam.eps_c_beta, -cam.eps_c_alpha);
    ctx.actual = internal::vehicle_rotation(est.alpha, est.beta, 0.0) * mount *
                 internal::base_axes();
    ctx.reference = mount * internal::base_axes();
  }

  LabeledSet out;
  out.x_drift = ctx.x_drift;
  out.y_drift = ctx.y_drift;

  std::vector<DetectedLine> lat_corrected, long_corrected;
  lat_corrected.reserve(lat.lines.size());
  long_corrected.reserve(longi.lines.size());
  for (const auto& l : lat.lines) lat_corrected.push_back(correct_line(l, cam, ctx));
  for (const auto& l : longi.lines) long_corrected.push_back(correct_line(l, cam, ctx));

  out.lat = label_set(std::move(lat_corrected), cam);
  out.longi = label_set(std::move(long_corrected), cam);
  return out;
}

} // namespace mlog
