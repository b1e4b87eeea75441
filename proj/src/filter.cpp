#include "mlog/filter.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mlog/simulator.hpp" // mix_seed

namespace mlog {

namespace {

struct Candidate {
  double a = 0, b = 0, c = 0;
  int inliers = -1;
  double ssr = 0.0;
  std::vector<char> mask;
};

bool model_from_pair(double x0, double y0, double x1, double y1, Candidate* cand) {
  const double dx = x1 - x0, dy = y1 - y0;
  const double len = std::hypot(dx, dy);
  if (len < 1e-12) return false;
  cand->a = -dy / len;
  cand->b = dx / len;
  cand->c = -(cand->a * x0 + cand->b * y0);
  return true;
}

/// Orthogonal (total) least squares line through the points, homogeneous form.
void refit_tls(const std::vector<double>& xs, const std::vector<double>& ys,
               const std::vector<char>& mask, double* a, double* b, double* c) {
  double mx = 0, my = 0;
  int n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!mask[i]) continue;
    mx += xs[i];
    my += ys[i];
    ++n;
  }
  if (n < 2) return;
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!mask[i]) continue;
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  // Normal = eigenvector of the smaller eigenvalue of the scatter matrix.
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double lam_small = tr / 2.0 - disc;
  double nx = sxy, ny = lam_small - sxx;
  double norm = std::hypot(nx, ny);
  if (norm < 1e-15) { // isotropic or degenerate; keep the pair model
    return;
  }
  nx /= norm;
  ny /= norm;
  *a = nx;
  *b = ny;
  *c = -(nx * mx + ny * my);
}

} // namespace

std::vector<DetectedLine> theta_gate(std::span<const DetectedLine> lines) {
  std::vector<DetectedLine> kept;
  kept.reserve(lines.size());
  for (const auto& l : lines)
    if (l.theta >= -kPi / 4.0 && l.theta < 3.0 * kPi / 4.0) kept.push_back(l);
  return kept;
}

std::optional<RansacResult> ransac_line_rt(std::span<const DetectedLine> points,
                                           double d, int t, int iterations,
                                           std::uint64_t seed, double normalizer,
                                           FilterError* error, double early_exit_ratio) {
  auto fail = [&](FilterError e) {
    if (error) *error = e;
    return std::nullopt;
  };
  const std::size_t n = points.size();
  if (n < 2) return fail(FilterError::TooFewLines);
  if (d <= 0.0 || t < 1 || iterations < 1 || normalizer <= 0.0)
    throw std::invalid_argument("ransac_line_rt: bad parameters");

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = points[i].theta;
    ys[i] = points[i].rho / normalizer;
  }

  bool degenerate = true;
  for (std::size_t i = 1; i < n && degenerate; ++i)
    degenerate = std::abs(xs[i] - xs[0]) < 1e-12 && std::abs(ys[i] - ys[0]) < 1e-12;
  if (degenerate) return fail(FilterError::Degenerate);

  Candidate best;
  auto evaluate = [&](std::size_t i, std::size_t j) {
    Candidate cand;
    if (!model_from_pair(xs[i], ys[i], xs[j], ys[j], &cand)) return;
    cand.mask.assign(n, 0);
    cand.inliers = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double dist = std::abs(cand.a * xs[k] + cand.b * ys[k] + cand.c);
      if (dist <= d) {
        cand.mask[k] = 1;
        ++cand.inliers;
        cand.ssr += dist * dist;
      }
    }
    if (cand.inliers > best.inliers ||
        (cand.inliers == best.inliers && cand.ssr < best.ssr - 1e-18)) {
      best = std::move(cand);
    }
  };

  const std::size_t total_pairs = n * (n - 1) / 2;
  if (total_pairs <= std::size_t(iterations)) {
    for (std::size_t i = 0; i < n && best.inliers < int(early_exit_ratio * double(n)); ++i)
      for (std::size_t j = i + 1; j < n; ++j) evaluate(i, j);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int it = 0; it < iterations; ++it) {
      if (best.inliers >= int(early_exit_ratio * double(n))) break;
      const std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      if (j == i) j = (j + 1) % n;
      evaluate(i, j);
    }
  }

  if (best.inliers < t) return fail(FilterError::NoConsensus);

  refit_tls(xs, ys, best.mask, &best.a, &best.b, &best.c);

  RansacResult result;
  result.model.a = best.a;
  result.model.b = best.b;
  result.model.c = best.c;
  result.model.normalizer = normalizer;
  if (std::abs(best.b) > 1e-12) {
    result.model.slope = -normalizer * best.a / best.b;
    result.model.intercept = -normalizer * best.c / best.b;
  } else {
    result.model.degenerate = true; // vertical in (theta, rho): constant theta
    result.model.slope = 0.0;
    result.model.intercept = 0.0;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (best.mask[k])
      result.inliers.push_back(points[k]);
    else
      result.rest.push_back(points[k]);
  }
  return result;
}

std::optional<FilterResult> filter_grid_lines(std::span<const DetectedLine> lines,
                                              const PipelineConfig& cfg,
                                              const CameraModel& cam,
                                              std::uint64_t seed, FilterError* error) {
  const std::vector<DetectedLine> gated = theta_gate(lines);
  const double norm = cam.diagonal();

  auto pass1 = ransac_line_rt(gated, cfg.ransac_width_d, cfg.ransac_min_inliers_t,
                              cfg.ransac_iterations, mix_seed(seed, 1), norm, error,
                              cfg.ransac_early_exit_ratio);
  if (!pass1) return std::nullopt;
  auto pass2 = ransac_line_rt(pass1->rest, cfg.ransac_width_d, cfg.ransac_min_inliers_t,
                              cfg.ransac_iterations, mix_seed(seed, 2), norm, error,
                              cfg.ransac_early_exit_ratio);
  if (!pass2) return std::nullopt;

  auto mean_theta = [](const std::vector<DetectedLine>& v) {
    double s = 0.0;
    for (const auto& l : v) s += l.theta;
    return s / double(v.size());
  };
  const double m1 = mean_theta(pass1->inliers);
  const double m2 = mean_theta(pass2->inliers);

  FilterResult result;
  // The set with mean theta nearer 0 is longitudinal, the other latitudinal.
  const bool first_is_long = std::abs(m1) <= std::abs(m2);
  if (first_is_long) {
    result.long_lines = std::move(pass1->inliers);
    result.model_long = pass1->model;
    result.lat_lines = std::move(pass2->inliers);
    result.model_lat = pass2->model;
  } else {
    result.lat_lines = std::move(pass1->inliers);
    result.model_lat = pass1->model;
    result.long_lines = std::move(pass2->inliers);
    result.model_long = pass2->model;
  }
  result.outliers = std::move(pass2->rest);
  return result;
}

} // namespace mlog
