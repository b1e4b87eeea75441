#include <doctest.h>

#include "mlog/types.hpp"

using namespace mlog;

TEST_CASE("max_speed formula") {
  CHECK(max_speed({1.0, 1.0}, 30.0, 3) == doctest::Approx(10.0));
  CHECK(max_speed({1.0, 1.0}, 3.0, 3) == doctest::Approx(1.0));
  CHECK(max_speed({0.5, 0.5}, 60.0, 4) == doctest::Approx(7.5));
  // The limiting cell size is the smaller one.
  CHECK(max_speed({0.5, 2.0}, 30.0, 3) == doctest::Approx(5.0));
}

TEST_CASE("max_speed rejects speed factors below 3") {
  CHECK_THROWS_AS(max_speed({1.0, 1.0}, 30.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(max_speed({1.0, 1.0}, 0.0, 3), std::invalid_argument);
}

TEST_CASE("config defaults match the constant table") {
  PipelineConfig cfg;
  CHECK(cfg.ransac_width_d == 0.1);
  CHECK(cfg.ransac_min_inliers_t == 10);
  CHECK(cfg.kde_bandwidth_b == 20.0);
  CHECK(cfg.cluster_threshold_fraction == 0.25);
  CHECK(cfg.energy_ratio_eps_e == 1.0e2);
  CHECK(cfg.speed_factor_eps_s == 3);
  CHECK(cfg.valid());
  cfg.speed_factor_eps_s = 2;
  CHECK_FALSE(cfg.valid());
}

TEST_CASE("camera model defaults and validity") {
  CameraModel cam;
  CHECK(cam.valid());
  CHECK(cam.cx == doctest::Approx(cam.width / 2.0));
  CHECK(cam.cy == doctest::Approx(cam.height / 2.0));
  cam.f = -1;
  CHECK_FALSE(cam.valid());
}

TEST_CASE("world-image axis mapping is an involution") {
  // X_img = -Y_world, Y_img = -X_world, Z_img = -Z_world as a matrix; the
  // same matrix maps image axes back to world axes.
  const int m[3][3] = {{0, -1, 0}, {-1, 0, 0}, {0, 0, -1}};
  int sq[3][3] = {};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) sq[i][j] += m[i][k] * m[k][j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(sq[i][j] == (i == j ? 1 : 0));
}
