#include "mlog/simulator.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mlog/cluster.hpp"
#include "mlog/filter.hpp"
#include "mlog/orientation.hpp"
#include "rotation.hpp"

namespace mlog {

using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

Matrix3d camera_axes(const TruePose& pose, const MountTilt& mount) {
  return internal::vehicle_rotation(pose.alpha, pose.beta, pose.gamma) *
         internal::mount_rotation(mount.toward_x, mount.toward_y) *
         internal::base_axes();
}

struct ImageLine {
  // u*cos(theta) + v*sin(theta) = rho, canonical rho >= 0, theta in [-pi, pi)
  double rho = 0.0;
  double theta = 0.0;
};

double wrap_theta(double t) {
  while (t >= kPi) t -= 2.0 * kPi;
  while (t < -kPi) t += 2.0 * kPi;
  return t;
}

DetectedLine canonical(double rho, double theta) {
  theta = wrap_theta(theta);
  if (rho < 0.0) {
    rho = -rho;
    theta = wrap_theta(theta + kPi);
  }
  return {rho, theta};
}

/// Image line of the 3D line A + t*D seen by a camera with the given axes
/// and center. Returns false when the line passes through the optical
/// center (no unique image line).
bool project_world_line(const Vector3d& a_world, const Vector3d& d_world,
                        const Vector3d& cam_center, const Matrix3d& axes,
                        const CameraModel& cam, ImageLine* out) {
  const Vector3d a = axes.transpose() * (a_world - cam_center);
  const Vector3d d = axes.transpose() * d_world;
  const Vector3d n = a.cross(d); // normal of the plane through the center and line
  // Pixel (u, v) lies on the image line iff the ray ((u-cx)/f,(v-cy)/f,1)
  // is orthogonal to n.
  const double la = n.x();
  const double lb = n.y();
  const double lc = cam.f * n.z() - n.x() * cam.cx - n.y() * cam.cy;
  const double norm = std::hypot(la, lb);
  if (norm < 1e-12) return false;
  double rho = -lc / norm;
  double theta = std::atan2(lb / norm, la / norm);
  if (rho < 0.0) {
    rho = -rho;
    theta = wrap_theta(theta + kPi);
  } else {
    theta = wrap_theta(theta);
  }
  out->rho = rho;
  out->theta = theta;
  return true;
}

/// Clips the infinite image line to the image rectangle. Returns the
/// endpoints of the visible segment, or false when the line misses the
/// rectangle.
bool clip_to_image(const ImageLine& line, const CameraModel& cam, Vector2d* p0,
                   Vector2d* p1) {
  const double c = std::cos(line.theta), s = std::sin(line.theta);
  const double w = cam.width, h = cam.height;
  std::vector<Vector2d> pts;
  auto push_unique = [&](double u, double v) {
    for (const auto& q : pts)
      if (std::abs(q.x() - u) < 1e-9 && std::abs(q.y() - v) < 1e-9) return;
    pts.emplace_back(u, v);
  };
  // u*c + v*s = rho against each border.
  if (std::abs(s) > 1e-12) {
    for (double u : {0.0, w}) {
      const double v = (line.rho - u * c) / s;
      if (v >= -1e-9 && v <= h + 1e-9) push_unique(u, v);
    }
  }
  if (std::abs(c) > 1e-12) {
    for (double v : {0.0, h}) {
      const double u = (line.rho - v * s) / c;
      if (u >= -1e-9 && u <= w + 1e-9) push_unique(u, v);
    }
  }
  if (pts.size() < 2) return false;
  // Keep the farthest pair (corners can duplicate hits).
  double best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d2 = (pts[i] - pts[j]).squaredNorm();
      if (d2 > best) {
        best = d2;
        *p0 = pts[i];
        *p1 = pts[j];
      }
    }
  return best > 1e-6;
}

/// True when the pixel's viewing ray points below the horizon (hits the
/// floor in front of the camera).
bool ray_hits_floor(const Vector2d& px, const Matrix3d& axes, const CameraModel& cam) {
  const Vector3d dir_cam((px.x() - cam.cx) / cam.f, (px.y() - cam.cy) / cam.f, 1.0);
  const Vector3d dir_world = axes * dir_cam;
  return dir_world.z() < -1e-9;
}

/// Floor point hit by the pixel's viewing ray.
bool ray_floor_point(const Vector2d& px, const Vector3d& center, const Matrix3d& axes,
                     const CameraModel& cam, Vector2d* ground) {
  const Vector3d dir_cam((px.x() - cam.cx) / cam.f, (px.y() - cam.cy) / cam.f, 1.0);
  const Vector3d dir_world = axes * dir_cam;
  if (dir_world.z() >= -1e-9) return false;
  const double t = -center.z() / dir_world.z();
  const Vector3d hit = center + t * dir_world;
  *ground = Vector2d(hit.x(), hit.y());
  return true;
}

struct VisibleLine {
  Axis axis;
  long index;
  ImageLine line;
};

std::vector<VisibleLine> visible_grid_lines(const TruePose& pose, const CameraModel& cam,
                                            const GridSpec& grid, const MountTilt& mount) {
  std::vector<VisibleLine> result;
  const Matrix3d axes = camera_axes(pose, mount);
  const Vector3d center(pose.x, pose.y, pose.h);

  // Ground footprint from the corner and border-midpoint rays.
  std::vector<Vector2d> probes = {{0, 0},
                                  {double(cam.width), 0},
                                  {0, double(cam.height)},
                                  {double(cam.width), double(cam.height)},
                                  {cam.cx, 0},
                                  {cam.cx, double(cam.height)},
                                  {0, cam.cy},
                                  {double(cam.width), cam.cy}};
  double min_x = pose.x, max_x = pose.x, min_y = pose.y, max_y = pose.y;
  int hits = 0;
  for (const auto& p : probes) {
    Vector2d g;
    if (!ray_floor_point(p, center, axes, cam, &g)) continue;
    ++hits;
    min_x = std::min(min_x, g.x());
    max_x = std::max(max_x, g.x());
    min_y = std::min(min_y, g.y());
    max_y = std::max(max_y, g.y());
  }
  if (hits < int(probes.size())) {
    // Part of the view is above the horizon; fall back to a generous range.
    const double reach = pose.h * 50.0 + 10.0;
    min_x = std::min(min_x, pose.x - reach);
    max_x = std::max(max_x, pose.x + reach);
    min_y = std::min(min_y, pose.y - reach);
    max_y = std::max(max_y, pose.y + reach);
  }

  auto consider = [&](Axis axis, long k) {
    Vector3d a_world, d_world;
    if (axis == Axis::Y) { // longitudinal: Y = k*m_y, runs along X
      a_world = Vector3d(pose.x, double(k) * grid.m_y, 0.0);
      d_world = Vector3d(1, 0, 0);
    } else { // latitudinal: X = k*m_x, runs along Y
      a_world = Vector3d(double(k) * grid.m_x, pose.y, 0.0);
      d_world = Vector3d(0, 1, 0);
    }
    ImageLine img;
    if (!project_world_line(a_world, d_world, center, axes, cam, &img)) return;
    Vector2d p0, p1;
    if (!clip_to_image(img, cam, &p0, &p1)) return;
    if (!ray_hits_floor(p0, axes, cam) || !ray_hits_floor(p1, axes, cam)) return;
    result.push_back({axis, k, img});
  };

  const long ky0 = long(std::floor(min_y / grid.m_y)) - 1;
  const long ky1 = long(std::ceil(max_y / grid.m_y)) + 1;
  for (long k = ky0; k <= ky1; ++k) consider(Axis::Y, k);
  const long kx0 = long(std::floor(min_x / grid.m_x)) - 1;
  const long kx1 = long(std::ceil(max_x / grid.m_x)) + 1;
  for (long k = kx0; k <= kx1; ++k) consider(Axis::X, k);
  return result;
}

double linreg_slope(const std::vector<double>& x, const std::vector<double>& y,
                    double* intercept, double* resid_sd) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  double slope = 0.0;
  if (sxx > 1e-18) slope = sxy / sxx;
  *intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (slope * x[i] + *intercept);
    ss += r * r;
  }
  *resid_sd = n > 2 ? std::sqrt(ss / double(n - 2)) : 0.0;
  return slope;
}

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RenderedFrame render_frame(const TruePose& pose, const CameraModel& cam,
                           const GridSpec& grid, const NoiseSpec& noise,
                           const MountTilt& mount, std::int64_t frame_index) {
  if (pose.h <= 0.0) throw std::invalid_argument("render_frame: pose height must be > 0");
  if (!cam.valid() || !grid.valid())
    throw std::invalid_argument("render_frame: invalid camera or grid");
  if (noise.duplicates_min < 1 || noise.duplicates_max < noise.duplicates_min ||
      noise.outliers_min < 0 || noise.outliers_max < noise.outliers_min ||
      noise.sigma_rho < 0.0 || noise.sigma_theta < 0.0)
    throw std::invalid_argument("render_frame: invalid noise spec");

  RenderedFrame frame;
  frame.input.frame_index = frame_index;

  std::mt19937_64 rng(mix_seed(noise.seed, std::uint64_t(frame_index)));
  std::normal_distribution<double> jitter_rho(0.0, noise.sigma_rho);
  std::normal_distribution<double> jitter_theta(0.0, noise.sigma_theta);
  std::uniform_int_distribution<int> dup_count(noise.duplicates_min, noise.duplicates_max);
  std::uniform_int_distribution<int> outlier_count(noise.outliers_min, noise.outliers_max);

  const auto visible = visible_grid_lines(pose, cam, grid, mount);
  for (const auto& v : visible) {
    const int dups = dup_count(rng);
    for (int k = 0; k < dups; ++k) {
      double rho = v.line.rho;
      double theta = v.line.theta;
      if (noise.sigma_rho > 0.0) rho += jitter_rho(rng);
      if (noise.sigma_theta > 0.0) theta += jitter_theta(rng);
      const DetectedLine emitted = canonical(rho, theta);
      frame.input.lines.push_back(emitted);
      frame.truth.push_back({emitted, false, v.axis, v.index, v.line.rho, v.line.theta});
    }
  }

  const int outliers = outlier_count(rng);
  std::uniform_real_distribution<double> uni_rho(0.0, cam.diagonal());
  std::uniform_real_distribution<double> uni_theta(-kPi, kPi);
  for (int k = 0; k < outliers; ++k) {
    const DetectedLine emitted = canonical(uni_rho(rng), uni_theta(rng));
    frame.input.lines.push_back(emitted);
    frame.truth.push_back({emitted, true, Axis::Y, 0, emitted.rho, emitted.theta});
  }
  return frame;
}

double raycast_center_offset(double s, double h, double f, double eps_c) {
  if (h <= 0.0) throw std::invalid_argument("raycast_center_offset: h must be > 0");
  // Camera at (0, 0, h), tilted by eps_c about X so the view moves along +Y.
  const Matrix3d axes =
      Eigen::AngleAxisd(eps_c, Vector3d::UnitX()).toRotationMatrix() *
      internal::base_axes();
  const Vector3d center(0, 0, h);
  const Vector3d ground_point(0, s, 0);
  const Vector3d rel = ground_point - center;
  const double depth = rel.dot(axes.col(2));
  if (std::abs(depth) < 1e-12)
    throw std::domain_error("raycast_center_offset: point at the camera plane");
  // Pierce point of the viewing ray on the image plane (focal distance f
  // along the optical axis), relative to the principal point.
  const Vector3d on_plane = center + (f / depth) * rel;
  const Vector3d principal = center + f * axes.col(2);
  // Measured along the ground-parallel direction of the image plane (+Y).
  return (on_plane - principal).dot(Vector3d::UnitY());
}

GrayImage render_grid_image(const TruePose& pose, const CameraModel& cam,
                            const GridSpec& grid, const MountTilt& mount,
                            double half_thickness) {
  GrayImage img(cam.width, cam.height, 220);
  const auto visible = visible_grid_lines(pose, cam, grid, mount);
  std::vector<std::array<Vector2d, 2>> segments;
  for (const auto& v : visible) {
    Vector2d p0, p1;
    if (clip_to_image(v.line, cam, &p0, &p1)) segments.push_back({p0, p1});
  }
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const Vector2d p(x + 0.5, y + 0.5);
      for (const auto& seg : segments) {
        const Vector2d d = seg[1] - seg[0];
        const double len2 = d.squaredNorm();
        double t = len2 > 0 ? (p - seg[0]).dot(d) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dist = (p - (seg[0] + t * d)).norm();
        if (dist <= half_thickness) {
          img.at(x, y) = 30;
          break;
        }
      }
    }
  }
  return img;
}

std::vector<TruePose> gen_trajectory(const std::vector<std::array<double, 2>>& waypoints,
                                     const GridSpec& grid, const TrajectoryOptions& opts) {
  if (waypoints.size() < 2)
    throw std::invalid_argument("gen_trajectory: need at least 2 waypoints");
  if (opts.speed <= 0.0 || opts.fps <= 0.0)
    throw std::invalid_argument("gen_trajectory: speed and fps must be > 0");
  const double v_max = max_speed(grid, opts.fps, opts.eps_s >= 3 ? opts.eps_s : 3);
  const double limit = opts.eps_s >= 3
                           ? v_max
                           : std::min(grid.m_x, grid.m_y) * opts.fps / double(opts.eps_s);
  if (opts.speed > limit + 1e-12 && !opts.force_overspeed)
    throw std::invalid_argument("gen_trajectory: speed exceeds the frame-rate limit; "
                                "set force_overspeed to proceed");

  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double dx = waypoints[i][0] - waypoints[i - 1][0];
    const double dy = waypoints[i][1] - waypoints[i - 1][1];
    cum.push_back(cum.back() + std::hypot(dx, dy));
  }
  const double total = cum.back();
  if (total <= 0.0) throw std::invalid_argument("gen_trajectory: degenerate path");

  const double duration = total / opts.speed;
  const long n = long(std::floor(duration * opts.fps + 1e-9)) + 1;

  auto position_at = [&](double s) {
    s = std::clamp(s, 0.0, total);
    std::size_t seg = 1;
    while (seg < cum.size() - 1 && cum[seg] < s) ++seg;
    const double seg_len = cum[seg] - cum[seg - 1];
    const double t = seg_len > 0 ? (s - cum[seg - 1]) / seg_len : 0.0;
    return Vector2d(
        waypoints[seg - 1][0] + t * (waypoints[seg][0] - waypoints[seg - 1][0]),
        waypoints[seg - 1][1] + t * (waypoints[seg][1] - waypoints[seg - 1][1]));
  };

  std::vector<Vector2d> pos(n);
  for (long k = 0; k < n; ++k) pos[std::size_t(k)] = position_at(opts.speed * double(k) / opts.fps);

  // Finite-difference acceleration, then zero-phase exponential smoothing.
  const double dt = 1.0 / opts.fps;
  std::vector<Vector2d> acc(n, Vector2d::Zero());
  for (long k = 1; k + 1 < n; ++k)
    acc[std::size_t(k)] =
        (pos[std::size_t(k + 1)] - 2.0 * pos[std::size_t(k)] + pos[std::size_t(k - 1)]) / (dt * dt);
  const double tau = 0.15;
  const double lam = std::exp(-dt / tau);
  Vector2d f = Vector2d::Zero();
  for (long k = 0; k < n; ++k) {
    f = lam * f + (1.0 - lam) * acc[std::size_t(k)];
    acc[std::size_t(k)] = f;
  }
  f = Vector2d::Zero();
  for (long k = n - 1; k >= 0; --k) {
    f = lam * f + (1.0 - lam) * acc[std::size_t(k)];
    acc[std::size_t(k)] = f;
  }

  std::mt19937_64 rng(mix_seed(opts.seed, 0xA77ULL));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double g = 9.81;

  std::vector<TruePose> out(static_cast<std::size_t>(n));
  long spike_until = -1;
  long spike_start = 0;
  double spike_sign = 1.0;
  int spike_axis = 0;
  const long spike_frames = std::max<long>(3, long(0.4 * opts.fps));
  for (long k = 0; k < n; ++k) {
    const double t = double(k) / opts.fps;
    TruePose p;
    p.x = pos[std::size_t(k)].x();
    p.y = pos[std::size_t(k)].y();
    p.h = opts.start_height +
          opts.height_amplitude * std::sin(2.0 * kPi * t / opts.height_period);
    // Tilt toward the acceleration direction, clamped to the excursion bound.
    double roll = std::clamp(-std::atan(acc[std::size_t(k)].y() / g), -opts.max_tilt, opts.max_tilt);
    double pitch = std::clamp(-std::atan(acc[std::size_t(k)].x() / g), -opts.max_tilt, opts.max_tilt);
    if (opts.spike_prob > 0.0) {
      if (k > spike_until && uni(rng) < opts.spike_prob) {
        spike_until = k + spike_frames;
        spike_start = k;
        spike_sign = uni(rng) < 0.5 ? -1.0 : 1.0;
        spike_axis = uni(rng) < 0.5 ? 0 : 1;
      }
      if (k <= spike_until) {
        const double prog = double(k - spike_start) / double(spike_frames);
        const double bump = std::sin(kPi * prog);
        const double extra = spike_sign * opts.spike_tilt * bump * bump;
        (spike_axis == 0 ? roll : pitch) += extra;
      }
    }
    p.alpha = roll;
    p.beta = pitch;
    p.gamma = opts.yaw_amplitude * std::sin(2.0 * kPi * t / (opts.height_period * 1.7));
    out[std::size_t(k)] = p;
  }
  return out;
}

std::vector<std::array<double, 2>> random_waypoints(double arena, double target_length,
                                                    std::uint64_t seed, double margin) {
  if (arena <= 2.0 * margin || target_length <= 0.0)
    throw std::invalid_argument("random_waypoints: bad arena or target length");
  std::mt19937_64 rng(mix_seed(seed, 0x17E5ULL));
  std::uniform_real_distribution<double> uni(margin, arena - margin);
  std::vector<std::array<double, 2>> pts;
  pts.push_back({uni(rng), uni(rng)});
  double total = 0.0;
  while (total < target_length) {
    std::array<double, 2> next{uni(rng), uni(rng)};
    const double d = std::hypot(next[0] - pts.back()[0], next[1] - pts.back()[1]);
    if (d < 1.0) continue;
    if (total + d >= target_length) {
      const double frac = (target_length - total) / d;
      next[0] = pts.back()[0] + frac * (next[0] - pts.back()[0]);
      next[1] = pts.back()[1] + frac * (next[1] - pts.back()[1]);
      pts.push_back(next);
      total = target_length;
      break;
    }
    total += d;
    pts.push_back(next);
  }
  return pts;
}

CameraModel CalibrationResult::apply(CameraModel cam) const {
  cam.eps_alpha = eps_alpha;
  cam.eps_beta = eps_beta;
  cam.eps_c_alpha = eps_c_alpha;
  cam.eps_c_beta = eps_c_beta;
  return cam;
}

CalibrationResult calibrate_constants(const CameraModel& cam, const GridSpec& grid,
                                      const std::vector<std::array<double, 2>>& sweep,
                                      const MountTilt& mount) {
  auto distinct = [](const std::vector<std::array<double, 2>>& s, int idx) {
    std::vector<double> vals;
    for (const auto& p : s) vals.push_back(p[std::size_t(idx)]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               vals.end());
    return vals.size();
  };
  const auto n_alpha = distinct(sweep, 0);
  const auto n_beta = distinct(sweep, 1);
  if (n_alpha < 2 && n_beta < 2)
    throw std::invalid_argument("calibrate_constants: degenerate sweep (all angles equal)");

  PipelineConfig cfg;
  cfg.ransac_min_inliers_t = 2;
  cfg.ransac_iterations = 500;

  std::vector<double> x_alpha, y_alpha, x_beta, y_beta;
  NoiseSpec clean;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    TruePose pose;
    pose.x = 0.5 * grid.m_x;
    pose.y = 0.5 * grid.m_y;
    pose.h = 2.5;
    pose.alpha = sweep[k][0];
    pose.beta = sweep[k][1];
    const RenderedFrame frame = render_frame(pose, cam, grid, clean, mount,
                                             std::int64_t(k));
    FilterError err;
    const auto filtered =
        filter_grid_lines(frame.input.lines, cfg, cam, mix_seed(7, k), &err);
    if (!filtered) continue;
    bool obs_lat = false, obs_long = false;
    const double m_lat = fit_theta_rho_slope(filtered->lat_lines, cam, &obs_lat);
    const double m_long = fit_theta_rho_slope(filtered->long_lines, cam, &obs_long);
    if (obs_lat) {
      x_alpha.push_back(std::atan(m_lat));
      y_alpha.push_back(pose.alpha);
    }
    if (obs_long) {
      x_beta.push_back(std::atan(m_long));
      y_beta.push_back(pose.beta);
    }
  }

  CalibrationResult result;
  auto fit_axis = [](const std::vector<double>& x, const std::vector<double>& y,
                     double* gain, double* offset, double* resid) {
    if (x.size() < 2) return;
    double intercept = 0.0, sd = 0.0;
    const double slope = linreg_slope(x, y, &intercept, &sd);
    if (slope != 0.0) {
      *gain = slope;
      *offset = intercept;
      *resid = sd;
    }
  };
  fit_axis(x_alpha, y_alpha, &result.eps_alpha, &result.eps_c_alpha,
           &result.resid_sd_alpha);
  fit_axis(x_beta, y_beta, &result.eps_beta, &result.eps_c_beta, &result.resid_sd_beta);
  return result;
}

} // namespace mlog
