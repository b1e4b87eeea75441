#include <doctest.h>

#include <cmath>
#include <random>

#include "mlog/grid_model.hpp"
#include "mlog/simulator.hpp"

using namespace mlog;

TEST_CASE("principal_offset") {
  CHECK(principal_offset(2.0, 0.0) == doctest::Approx(0.0));
  CHECK(principal_offset(2.0, 0.1) == doctest::Approx(0.200669).epsilon(1e-5));
  CHECK(principal_offset(1.5, 0.3) == doctest::Approx(1.5 * std::tan(0.3)).epsilon(1e-12));
  CHECK_THROWS_AS(principal_offset(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(principal_offset(2.0, kPi / 2), std::invalid_argument);
}

TEST_CASE("project_ground_distance pinhole reduction") {
  CHECK(*project_ground_distance(1.0, 2.0, 600.0, 0.0) == doctest::Approx(300.0));
  CHECK(*project_ground_distance(0.0, 1.7, 600.0, 0.0) == doctest::Approx(0.0));
  CHECK(*project_ground_distance(0.0, 1.7, 600.0, 0.2) == doctest::Approx(0.0));
}

TEST_CASE("projection singularity returns nothing") {
  // A point far behind a tilted-forward view crosses the image plane:
  // delta = atan(c/h) - eps_c passes -pi/2.
  CHECK_FALSE(project_ground_distance(-1e9, 1.0, 600.0, 0.3).has_value());
  CHECK_FALSE(project_ground_distance(-3.0, 0.5, 600.0, 0.3).has_value());
  CHECK(project_ground_distance(-3.0, 2.0, 600.0, 0.3).has_value());
}

TEST_CASE("project_ground_distance matches the raycast oracle") {
  // The raycast measures the image-plane offset along the ground-parallel
  // direction; the model formula must agree to numerical precision.
  const double oracle = raycast_center_offset(0.7, 1.8, 600.0, 0.1) -
                        raycast_center_offset(1.8 * std::tan(0.1), 1.8, 600.0, 0.1);
  const double model = *project_ground_distance(0.7, 1.8, 600.0, 0.1) -
                       *project_ground_distance(1.8 * std::tan(0.1), 1.8, 600.0, 0.1);
  CHECK(model == doctest::Approx(oracle).epsilon(1e-9));

  // And as absolute offsets from the principal point.
  for (double eps_c : {0.0, 0.1, 0.3}) {
    for (double c : {-1.2, -0.4, 0.0, 0.3, 0.9, 2.0}) {
      const double ray = raycast_center_offset(c, 1.8, 600.0, eps_c) -
                         raycast_center_offset(1.8 * std::tan(eps_c), 1.8, 600.0, eps_c);
      const double mod = *project_ground_distance(c, 1.8, 600.0, eps_c) -
                         *project_ground_distance(1.8 * std::tan(eps_c), 1.8, 600.0, eps_c);
      CHECK(std::abs(mod - ray) < 1e-6);
    }
  }
}

TEST_CASE("label_to_index") {
  CHECK(label_to_index(0, 0.3, 1.0, 0.0) == -1);
  CHECK(label_to_index(1, 0.3, 1.0, 0.0) == 0);
  CHECK(label_to_index(0, 0.2, 1.0, 0.5) == 0);
}

TEST_CASE("model_rho symmetric at cell center") {
  AxisModelParams p;
  p.o = 0.5;
  p.h = 2.0;
  p.m = 1.0;
  p.f = 600.0;
  p.eps_c = 0.0;
  CHECK(*model_rho(0, p) == doctest::Approx(-150.0));
  CHECK(*model_rho(1, p) == doctest::Approx(150.0));
}

TEST_CASE("model_rho at a cell boundary") {
  AxisModelParams p;
  p.o = 0.0;
  p.h = 2.0;
  p.m = 1.0;
  p.f = 600.0;
  p.eps_c = 0.0;
  // Camera directly over a line: label 0 is the next line, one cell ahead.
  CHECK(label_to_index(0, p.o, p.m, 0.0) == 0);
  CHECK(*model_rho(0, p) == doctest::Approx(300.0));
}

TEST_CASE("model_rho equals the raycast across o, h, eps_c") {
  int checked = 0;
  for (double eps_c : {0.0, 0.1, 0.3}) {
    for (double o : {0.0, 0.2, 0.5, 0.9}) {
      for (double h : {0.5, 1.0, 2.0, 5.0}) {
        AxisModelParams p;
        p.o = o;
        p.h = h;
        p.m = 1.0;
        p.f = 600.0;
        p.eps_c = eps_c;
        const double s_p = h * std::tan(eps_c);
        for (long j = -2; j <= 2; ++j) {
          const auto mod = model_rho(j, p);
          const long i = label_to_index(j, o, p.m, s_p);
          const double s = p.m * double(i + 1) - o;
          // A line behind the tilted camera's image plane is singular for
          // the model and has non-positive raycast depth; skip it.
          const double depth = h * std::cos(eps_c) + s * std::sin(eps_c);
          if (!mod.has_value()) {
            CHECK(depth < 0.05 * h);
            continue;
          }
          const double ray = raycast_center_offset(s, h, p.f, eps_c) -
                             raycast_center_offset(s_p, h, p.f, eps_c);
          CHECK(std::abs(*mod - ray) < 1e-6);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("monotone in the label for an untilted camera") {
  AxisModelParams p;
  p.o = 0.37;
  p.h = 2.2;
  p.m = 1.0;
  p.f = 600.0;
  double prev = -1e18;
  for (long j = -3; j <= 3; ++j) {
    const double v = *model_rho(j, p);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("label shift moves the prediction by one projected cell") {
  AxisModelParams p;
  p.o = 0.7;
  p.h = 1.6;
  p.m = 1.0;
  p.f = 600.0;
  p.eps_c = 0.1;
  const double s_p = principal_offset(p.h, p.eps_c);
  for (long j = -2; j <= 2; ++j) {
    const long i = label_to_index(j, p.o, p.m, s_p);
    const double s = p.m * double(i + 1) - p.o;
    const double cell_width = *project_ground_distance(s + p.m, p.h, p.f, p.eps_c) -
                              *project_ground_distance(s, p.h, p.f, p.eps_c);
    CHECK(*model_rho(j + 1, p) - *model_rho(j, p) == doctest::Approx(cell_width));
  }
}

TEST_CASE("offset plus one cell with relabeling reproduces the prediction") {
  // The label-to-index floor absorbs a whole-cell change of o: shifting o by
  // m while shifting labels by two lands on the same grid line.
  AxisModelParams p;
  p.o = 0.3;
  p.h = 2.0;
  p.m = 1.0;
  p.f = 600.0;
  AxisModelParams q = p;
  q.o = p.o + p.m;
  for (long j = -2; j <= 2; ++j)
    CHECK(*model_rho(j, p) == doctest::Approx(*model_rho(j + 2, q)).epsilon(1e-12));
}

TEST_CASE("residuals vanish for lines placed at the model prediction") {
  AxisModelParams p;
  p.o = 0.42;
  p.h = 2.0;
  p.m = 1.0;
  p.f = 600.0;
  const double center = 320.0;
  std::vector<LabeledLine> lines;
  for (long j = 0; j <= 3; ++j)
    lines.push_back({center - *model_rho(j, p), 0.0, int(j)});
  const auto rj = residuals_and_jacobian(lines, p, center);
  REQUIRE(rj.residuals.size() == lines.size());
  for (double r : rj.residuals) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("single-line sensitivity to the offset") {
  // d rho_mod / d o = -f/h for an untilted camera: +1 cm at h=2, f=600
  // moves the residual by about +3 px.
  AxisModelParams p;
  p.o = 0.42;
  p.h = 2.0;
  p.m = 1.0;
  p.f = 600.0;
  const double center = 320.0;
  std::vector<LabeledLine> lines = {{center - *model_rho(0, p), 0.0, 0}};
  AxisModelParams p2 = p;
  p2.o = p.o + 0.01;
  const auto r1 = residuals_and_jacobian(lines, p, center);
  const auto r2 = residuals_and_jacobian(lines, p2, center);
  CHECK(r2.residuals[0] - r1.residuals[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("analytic jacobian matches central finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uo(0.01, 0.99);
  std::uniform_real_distribution<double> uh(0.5, 5.0);
  std::uniform_real_distribution<double> ue(-0.3, 0.3);
  const double center = 320.0;
  for (int trial = 0; trial < 200; ++trial) {
    AxisModelParams p;
    p.o = uo(rng);
    p.h = uh(rng);
    p.m = 1.0;
    p.f = 600.0;
    p.eps_c = ue(rng);
    // Keep the stencil away from a label-index jump, where the model is
    // intentionally discontinuous.
    const double w = (p.h * std::tan(p.eps_c) - p.o) / p.m;
    if (std::abs(w - std::round(w)) < 1e-4) continue;
    std::vector<LabeledLine> lines;
    for (long j = -1; j <= 2; ++j) {
      const auto v = model_rho(j, p);
      if (v) lines.push_back({center - *v - 3.0, 0.0, int(j)});
    }
    if (lines.empty()) continue;
    const auto rj = residuals_and_jacobian(lines, p, center);
    const double step = 1e-6;
    for (int param = 0; param < 2; ++param) {
      AxisModelParams lo = p, hi = p;
      (param == 0 ? lo.o : lo.h) -= step;
      (param == 0 ? hi.o : hi.h) += step;
      const auto rl = residuals_and_jacobian(lines, lo, center);
      const auto rh = residuals_and_jacobian(lines, hi, center);
      if (rl.residuals.size() != rj.residuals.size() ||
          rh.residuals.size() != rj.residuals.size())
        continue; // a label-index jump inside the stencil
      for (std::size_t k = 0; k < rj.residuals.size(); ++k) {
        const double fd = (rh.residuals[k] - rl.residuals[k]) / (2.0 * step);
        const double an = param == 0 ? rj.d_res_d_o[k] : rj.d_res_d_h[k];
        CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
      }
    }
  }
}
