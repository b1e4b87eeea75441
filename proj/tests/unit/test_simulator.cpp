#include <doctest.h>

#include <cmath>
#include <set>

#include "mlog/orientation.hpp"
#include "mlog/simulator.hpp"

using namespace mlog;

namespace {
NoiseSpec clean() { return {}; }
} // namespace

TEST_CASE("cell-center pose renders a symmetric line pattern") {
  TruePose pose{0.5, 0.5, 2.0, 0, 0, 0};
  const auto frame = render_frame(pose, CameraModel{}, GridSpec{}, clean());
  REQUIRE_FALSE(frame.input.lines.empty());

  // The nearest longitudinal lines sit half a cell to each side: +-150 px
  // from the image center at f=600, h=2.
  std::set<int> long_offsets;
  for (const auto& t : frame.truth) {
    if (t.axis == Axis::Y && !t.outlier) {
      CHECK(std::abs(t.line.theta) < 1e-9); // vertical at a level pose
      long_offsets.insert(int(std::lround(t.line.rho - 320.0)));
    }
  }
  CHECK(long_offsets.count(150) == 1);
  CHECK(long_offsets.count(-150) == 1);
}

TEST_CASE("level-pose projection places world offsets on the correct side") {
  // A longitudinal line one cell to the +Y side of the camera must appear
  // left of the image center (image x = -world Y).
  TruePose pose{0.5, 0.0, 2.0, 0, 0, 0};
  const auto frame = render_frame(pose, CameraModel{}, GridSpec{}, clean());
  bool found = false;
  for (const auto& t : frame.truth) {
    if (t.axis == Axis::Y && t.world_index == 1) { // line at Y=1, offset +1
      CHECK(t.line.rho < 320.0);
      CHECK(t.line.rho == doctest::Approx(320.0 - 300.0));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("emitted non-outlier lines lie on the exact projection") {
  TruePose pose{0.31, 0.77, 2.3, deg2rad(3), deg2rad(-2), 0};
  NoiseSpec noise;
  noise.sigma_rho = 2.0;
  noise.sigma_theta = 0.01;
  noise.duplicates_min = 2;
  noise.duplicates_max = 3;
  noise.outliers_min = 2;
  noise.outliers_max = 2;
  noise.seed = 5;
  const auto frame = render_frame(pose, CameraModel{}, GridSpec{}, noise);
  int checked = 0;
  for (const auto& t : frame.truth) {
    if (t.outlier) continue;
    // Denoised: the recorded exact line, not the emitted one.
    const double d_rho = std::abs(t.exact_rho - t.line.rho);
    CHECK(d_rho < 4.0 * 2.0 + 1e-9); // jitter-bounded
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("pure yaw rotates both families by the yaw angle") {
  // Documents the failure mode of the zero-yaw assumption: a 10 degree yaw
  // shifts the theta of both parallel sets by the same 10 degrees.
  TruePose pose{0.5, 0.5, 2.0, 0, 0, deg2rad(10)};
  const auto frame = render_frame(pose, CameraModel{}, GridSpec{}, clean());
  double long_shift = 0.0, lat_shift = 0.0;
  int n_long = 0, n_lat = 0;
  for (const auto& t : frame.truth) {
    if (t.axis == Axis::Y) {
      long_shift += t.exact_theta;
      ++n_long;
    } else {
      lat_shift += t.exact_theta - kPi / 2;
      ++n_lat;
    }
  }
  REQUIRE(n_long > 0);
  REQUIRE(n_lat > 0);
  long_shift /= n_long;
  lat_shift /= n_lat;
  CHECK(std::abs(std::abs(long_shift) - deg2rad(10)) < deg2rad(0.75));
  CHECK(long_shift == doctest::Approx(lat_shift).epsilon(0.15));
}

TEST_CASE("rendering is reproducible for a fixed seed") {
  TruePose pose{0.4, 0.6, 2.1, deg2rad(2), deg2rad(1), 0};
  NoiseSpec noise;
  noise.sigma_rho = 1.5;
  noise.sigma_theta = 0.005;
  noise.duplicates_min = 1;
  noise.duplicates_max = 3;
  noise.outliers_min = 0;
  noise.outliers_max = 4;
  noise.seed = 123;
  const auto a = render_frame(pose, CameraModel{}, GridSpec{}, noise, {}, 17);
  const auto b = render_frame(pose, CameraModel{}, GridSpec{}, noise, {}, 17);
  REQUIRE(a.input.lines.size() == b.input.lines.size());
  for (std::size_t i = 0; i < a.input.lines.size(); ++i) {
    CHECK(a.input.lines[i].rho == b.input.lines[i].rho);
    CHECK(a.input.lines[i].theta == b.input.lines[i].theta);
  }
}

TEST_CASE("trajectory sample count") {
  // 9 m at 1 m/s and 30 fps: 270 intervals plus the start pose.
  TrajectoryOptions opts;
  opts.speed = 1.0;
  opts.fps = 30.0;
  const auto poses = gen_trajectory({{0.5, 0.5}, {9.5, 0.5}}, GridSpec{}, opts);
  CHECK(poses.size() == 271);
  CHECK(poses.front().x == doctest::Approx(0.5));
  CHECK(poses.back().x == doctest::Approx(9.5));
}

TEST_CASE("overspeed is rejected unless forced") {
  TrajectoryOptions opts;
  opts.speed = 11.0; // v_max = 10 at m=1, fps=30, eps_s=3
  opts.fps = 30.0;
  CHECK_THROWS_AS(gen_trajectory({{0.5, 0.5}, {9.5, 0.5}}, GridSpec{}, opts),
                  std::invalid_argument);
  opts.force_overspeed = true;
  CHECK_NOTHROW(gen_trajectory({{0.5, 0.5}, {9.5, 0.5}}, GridSpec{}, opts));
}

TEST_CASE("random waypoint paths hit the requested length") {
  const auto wps = random_waypoints(10.0, 264.60, 7);
  double total = 0.0;
  for (std::size_t i = 1; i < wps.size(); ++i)
    total += std::hypot(wps[i][0] - wps[i - 1][0], wps[i][1] - wps[i - 1][1]);
  CHECK(total == doctest::Approx(264.60).epsilon(1e-9));
  for (const auto& w : wps) {
    CHECK(w[0] >= 0.5);
    CHECK(w[0] <= 9.5);
    CHECK(w[1] >= 0.5);
    CHECK(w[1] <= 9.5);
  }
}

TEST_CASE("calibration on an untilted camera") {
  std::vector<std::array<double, 2>> sweep;
  for (int k = -5; k <= 5; ++k) {
    sweep.push_back({deg2rad(10.0) * k / 5.0, 0.0});
    sweep.push_back({0.0, deg2rad(10.0) * k / 5.0});
  }
  const auto cal = calibrate_constants(CameraModel{}, GridSpec{}, sweep);
  CHECK(std::abs(cal.eps_c_alpha) < deg2rad(0.05));
  CHECK(std::abs(cal.eps_c_beta) < deg2rad(0.05));
  CHECK(cal.resid_sd_alpha < deg2rad(0.2));
  CHECK(cal.resid_sd_beta < deg2rad(0.2));

  // The calibrated map recovers the true angles on a fresh render.
  const CameraModel cam = cal.apply(CameraModel{});
  TruePose pose{0.5, 0.5, 2.0, deg2rad(5), deg2rad(-3), 0};
  const auto frame = render_frame(pose, cam, GridSpec{}, clean());
  std::vector<DetectedLine> lat, longi;
  for (const auto& t : frame.truth)
    (t.axis == Axis::X ? lat : longi).push_back(t.line);
  const auto est = estimate_orientation(lat, longi, cam);
  CHECK(std::abs(est.alpha - pose.alpha) < deg2rad(0.2));
  CHECK(std::abs(est.beta - pose.beta) < deg2rad(0.2));
}

TEST_CASE("calibration recovers an injected mounting tilt") {
  MountTilt mount;
  mount.toward_y = deg2rad(2.0); // roll-axis mount
  std::vector<std::array<double, 2>> sweep;
  for (int k = -5; k <= 5; ++k) {
    sweep.push_back({deg2rad(8.0) * k / 5.0, 0.0});
    sweep.push_back({0.0, deg2rad(8.0) * k / 5.0});
  }
  const auto cal = calibrate_constants(CameraModel{}, GridSpec{}, sweep, mount);
  CHECK(std::abs(std::abs(cal.eps_c_alpha) - deg2rad(2.0)) < deg2rad(0.1));
  CHECK(cal.resid_sd_alpha < deg2rad(0.2));

  // With the calibrated constants the vehicle attitude comes out right even
  // though the camera itself is tilted.
  const CameraModel cam = cal.apply(CameraModel{});
  TruePose pose{0.5, 0.5, 2.0, deg2rad(4), 0, 0};
  const auto frame = render_frame(pose, cam, GridSpec{}, clean(), mount);
  std::vector<DetectedLine> lat, longi;
  for (const auto& t : frame.truth)
    (t.axis == Axis::X ? lat : longi).push_back(t.line);
  const auto est = estimate_orientation(lat, longi, cam);
  CHECK(std::abs(est.alpha - pose.alpha) < deg2rad(0.2));
}

TEST_CASE("degenerate calibration sweep is rejected") {
  std::vector<std::array<double, 2>> sweep(6, {0.1, 0.1});
  CHECK_THROWS_AS(calibrate_constants(CameraModel{}, GridSpec{}, sweep),
                  std::invalid_argument);
}
