#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "mlog/cluster.hpp"
#include "mlog/filter.hpp"
#include "mlog/orientation.hpp"
#include "mlog/simulator.hpp"

using namespace mlog;

namespace {

CameraModel calibrated_camera(double sweep_deg = 15.0) {
  std::vector<std::array<double, 2>> sweep;
  for (int k = -6; k <= 6; ++k) {
    sweep.push_back({deg2rad(sweep_deg) * k / 6.0, 0.0});
    sweep.push_back({0.0, deg2rad(sweep_deg) * k / 6.0});
  }
  return calibrate_constants(CameraModel{}, GridSpec{}, sweep).apply(CameraModel{});
}

struct SplitFrame {
  std::vector<DetectedLine> lat, longi;
};

SplitFrame split(const RenderedFrame& frame) {
  SplitFrame out;
  for (const auto& t : frame.truth) {
    if (t.outlier) continue;
    (t.axis == Axis::X ? out.lat : out.longi).push_back(t.line);
  }
  return out;
}

ClusteredSet as_clusters(const std::vector<DetectedLine>& lines) {
  ClusteredSet set;
  set.lines = lines;
  std::sort(set.lines.begin(), set.lines.end(),
            [](const DetectedLine& a, const DetectedLine& b) { return a.rho > b.rho; });
  return set;
}

} // namespace

TEST_CASE("level flight: zero slope, angles reduce to the offsets") {
  CameraModel cam;
  cam.eps_c_alpha = 0.031;
  cam.eps_c_beta = -0.011;
  std::vector<DetectedLine> lat = {{100, kPi / 2}, {250, kPi / 2}, {400, kPi / 2}};
  std::vector<DetectedLine> longi = {{120, 0.0}, {320, 0.0}, {520, 0.0}};
  const auto est = estimate_orientation(lat, longi, cam);
  CHECK(est.m_lat == 0.0);
  CHECK(est.m_long == 0.0);
  CHECK(est.alpha == doctest::Approx(0.031));
  CHECK(est.beta == doctest::Approx(-0.011));
}

TEST_CASE("reported slope matches the closed-form least squares") {
  CameraModel cam;
  std::vector<DetectedLine> lat = {{140, 1.50}, {150, 1.57}, {160, 1.64}};
  const auto est = estimate_orientation(lat, {}, cam);
  // Collinear points: rho-per-theta slope (160-140)/(1.64-1.50) = 142.86.
  CHECK(est.m_lat == doctest::Approx(142.857).epsilon(1e-3));
  CHECK(est.low_confidence); // empty longitudinal set
}

TEST_CASE("fewer than two lines yields an unobservable slope") {
  CameraModel cam;
  bool obs = true;
  const std::vector<DetectedLine> one = {{100, 0.1}};
  CHECK(fit_theta_rho_slope(one, cam, &obs) == 0.0);
  CHECK_FALSE(obs);
}

TEST_CASE("fitted slope tracks the rendered tilt") {
  const CameraModel cam; // slope only, no calibration needed
  for (double roll_deg : {-10.0, -4.0, 2.0, 8.0}) {
    TruePose pose{0.5, 0.5, 2.5, deg2rad(roll_deg), 0, 0};
    const auto frame = render_frame(pose, cam, GridSpec{}, NoiseSpec{});
    const auto parts = split(frame);
    bool obs = false;
    const double slope = fit_theta_rho_slope(parts.lat, cam, &obs);
    REQUIRE(obs);
    // Pure roll: d(theta)/d(rho_centered) = tan(roll)/f.
    CHECK(slope == doctest::Approx(std::tan(deg2rad(roll_deg)) / cam.f).epsilon(2e-3));
  }
}

TEST_CASE("angle recovery stays within 0.3 degrees over +-15 degrees") {
  const CameraModel cam = calibrated_camera(15.0);
  double worst = 0.0;
  for (int k = -15; k <= 15; k += 3) {
    TruePose pose{0.5, 0.5, 2.5, deg2rad(double(k)), deg2rad(double(-k) / 2.0), 0};
    const auto frame = render_frame(pose, cam, GridSpec{}, NoiseSpec{});
    const auto parts = split(frame);
    const auto est = estimate_orientation(parts.lat, parts.longi, cam);
    worst = std::max(worst, std::abs(est.alpha - pose.alpha));
    worst = std::max(worst, std::abs(est.beta - pose.beta));
  }
  CHECK(worst < deg2rad(0.3));
}

TEST_CASE("zero angles: drift correction only labels") {
  CameraModel cam;
  ClusteredSet longi = as_clusters({{170, 0.0}, {470, 0.0}});
  ClusteredSet lat = as_clusters({{90, kPi / 2}, {390, kPi / 2}});
  OrientationEstimate est; // zeros
  const auto labeled = drift_correct(lat, longi, est, cam, DriftMode::Shift);
  REQUIRE(labeled.longi.size() == 2);
  CHECK(labeled.longi[0].rho_c == doctest::Approx(470.0));
  CHECK(labeled.longi[1].rho_c == doctest::Approx(170.0));
  // Lines at 170 and 470 around cx=320: signed distances +150 and -150;
  // the negative side anchors label 0.
  CHECK(labeled.longi[0].label == 0);  // rho 470 -> d = -150
  CHECK(labeled.longi[1].label == 1);  // rho 170 -> d = +150
  REQUIRE(labeled.lat.size() == 2);
  CHECK(labeled.lat[0].label == 0);    // rho 390 -> below center
  CHECK(labeled.lat[1].label == 1);
}

TEST_CASE("shift mode moves a vertical line by tan(angle) * f") {
  CameraModel cam;
  ClusteredSet longi = as_clusters({{400, 0.0}});
  ClusteredSet lat;
  OrientationEstimate est;
  est.alpha = 0.1; // the roll-axis angle displaces vertical lines in image x
  const auto labeled = drift_correct(lat, longi, est, cam, DriftMode::Shift);
  REQUIRE(labeled.longi.size() == 1);
  CHECK(400.0 - labeled.longi[0].rho_c == doctest::Approx(std::tan(0.1) * 600.0));
  CHECK(labeled.x_drift == doctest::Approx(60.2355).epsilon(1e-4));
}

TEST_CASE("labels: consecutive, anchored, idempotent") {
  CameraModel cam;
  ClusteredSet longi = as_clusters({{20, 0.0}, {170, 0.0}, {470, 0.0}, {620, 0.0}});
  const auto labeled =
      drift_correct({}, longi, OrientationEstimate{}, cam, DriftMode::Shift);
  REQUIRE(labeled.longi.size() == 4);
  // rho 620, 470 are right of center (d < 0), 170, 20 left (d > 0).
  CHECK(labeled.longi[0].label == -1); // rho 620
  CHECK(labeled.longi[1].label == 0);  // rho 470
  CHECK(labeled.longi[2].label == 1);  // rho 170
  CHECK(labeled.longi[3].label == 2);  // rho 20

  // Re-correcting the already-corrected set with zero angles is a no-op.
  ClusteredSet again;
  for (const auto& l : labeled.longi) again.lines.push_back({l.rho_c, l.theta_c});
  const auto relabeled =
      drift_correct({}, again, OrientationEstimate{}, cam, DriftMode::Shift);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(relabeled.longi[i].rho_c == doctest::Approx(labeled.longi[i].rho_c));
    CHECK(relabeled.longi[i].label == labeled.longi[i].label);
  }
}

TEST_CASE("labels start at 1 when no line sits past the center") {
  CameraModel cam;
  ClusteredSet longi = as_clusters({{20, 0.0}, {170, 0.0}});
  const auto labeled =
      drift_correct({}, longi, OrientationEstimate{}, cam, DriftMode::Shift);
  CHECK(labeled.longi[0].label == 1); // rho 170, d = +150
  CHECK(labeled.longi[1].label == 2); // rho 20, d = +300
}

TEST_CASE("drift-corrected lines agree across attitudes") {
  // Frames rendered at the same position but different attitudes must
  // produce matching corrected rho for each physical line.
  const CameraModel cam = calibrated_camera();
  const GridSpec grid;

  // High enough that both families keep 2+ lines across the attitude range.
  const TruePose base{0.42, 0.73, 2.6, 0, 0, 0};
  std::map<int, double> base_rho_long, base_rho_lat;

  const std::vector<std::pair<double, double>> attitudes = {
      {0, 0}, {8, 8}, {-5, 3}, {10, -10}, {-8, -8}};
  for (const auto& [a_deg, b_deg] : attitudes) {
    TruePose pose = base;
    pose.alpha = deg2rad(a_deg);
    pose.beta = deg2rad(b_deg);
    const auto frame = render_frame(pose, cam, grid, NoiseSpec{});
    const auto parts = split(frame);
    REQUIRE(parts.longi.size() >= 2);
    REQUIRE(parts.lat.size() >= 1);
    const auto est = estimate_orientation(parts.lat, parts.longi, cam);
    const auto labeled = drift_correct(as_clusters(parts.lat), as_clusters(parts.longi),
                                       est, cam, DriftMode::Homography);

    // Labels are stable across attitudes once drift is removed, so the
    // corrected rho can be compared label-wise.
    std::map<int, double> rho_long, rho_lat;
    for (const auto& l : labeled.longi) rho_long[l.label] = l.rho_c;
    for (const auto& l : labeled.lat) rho_lat[l.label] = l.rho_c;

    if (a_deg == 0 && b_deg == 0) {
      base_rho_long = rho_long;
      base_rho_lat = rho_lat;
      continue;
    }
    int compared = 0;
    for (const auto& [label, rho] : rho_long) {
      const auto it = base_rho_long.find(label);
      if (it == base_rho_long.end()) continue;
      CHECK(std::abs(rho - it->second) < 2.0);
      ++compared;
    }
    for (const auto& [label, rho] : rho_lat) {
      const auto it = base_rho_lat.find(label);
      if (it == base_rho_lat.end()) continue;
      CHECK(std::abs(rho - it->second) < 2.0);
      ++compared;
    }
    CHECK(compared >= 3);
  }
}

TEST_CASE("shift mode approximates the homography at small angles") {
  const CameraModel cam = calibrated_camera();
  TruePose pose{0.42, 0.73, 2.0, deg2rad(1.0), deg2rad(-1.0), 0};
  const auto frame = render_frame(pose, cam, GridSpec{}, NoiseSpec{});
  const auto parts = split(frame);
  const auto est = estimate_orientation(parts.lat, parts.longi, cam);
  const auto exact = drift_correct(as_clusters(parts.lat), as_clusters(parts.longi), est,
                                   cam, DriftMode::Homography);
  const auto approx = drift_correct(as_clusters(parts.lat), as_clusters(parts.longi), est,
                                    cam, DriftMode::Shift);
  REQUIRE(exact.longi.size() == approx.longi.size());
  for (std::size_t i = 0; i < exact.longi.size(); ++i)
    CHECK(std::abs(exact.longi[i].rho_c - approx.longi[i].rho_c) < 0.5);
}
