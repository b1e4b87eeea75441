#include "mlog/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlog {

GrayImage detect_edges(const GrayImage& img, double threshold) {
  if (!img.valid() || img.width < 3 || img.height < 3)
    throw std::invalid_argument("detect_edges: image must be at least 3x3");
  if (threshold <= 0.0 || threshold >= 255.0)
    throw std::invalid_argument("detect_edges: threshold must be in (0, 255)");
  GrayImage out(img.width, img.height, 0);
  for (int y = 1; y + 1 < img.height; ++y) {
    for (int x = 1; x + 1 < img.width; ++x) {
      const double gx = (double(img.at(x + 1, y)) - double(img.at(x - 1, y))) / 2.0;
      const double gy = (double(img.at(x, y + 1)) - double(img.at(x, y - 1))) / 2.0;
      if (std::hypot(gx, gy) > threshold) out.at(x, y) = 255;
    }
  }
  return out;
}

std::vector<DetectedLine> hough_lines(const GrayImage& binary, const HoughParams& params) {
  if (!binary.valid()) throw std::invalid_argument("hough_lines: invalid image");
  if (params.rho_step <= 0.0 || params.theta_step <= 0.0 || params.votes_min < 2)
    throw std::invalid_argument("hough_lines: bad parameters");

  std::vector<std::pair<int, int>> edges;
  for (int y = 0; y < binary.height; ++y)
    for (int x = 0; x < binary.width; ++x)
      if (binary.at(x, y) > 127) edges.emplace_back(x, y);
  if (edges.empty()) return {};

  // Accumulate over theta in [0, pi), signed rho in [-D, D].
  const double diag = std::hypot(double(binary.width), double(binary.height));
  const int n_theta = std::max(1, int(std::ceil(kPi / params.theta_step)));
  const int half_rho = int(std::ceil(diag / params.rho_step));
  const int n_rho = 2 * half_rho + 1;

  std::vector<double> cos_t(n_theta), sin_t(n_theta);
  for (int k = 0; k < n_theta; ++k) {
    cos_t[std::size_t(k)] = std::cos(double(k) * params.theta_step);
    sin_t[std::size_t(k)] = std::sin(double(k) * params.theta_step);
  }

  std::vector<int> acc(std::size_t(n_theta) * std::size_t(n_rho), 0);
  auto at = [&](int k, int r) -> int& { return acc[std::size_t(k) * n_rho + r]; };
  for (const auto& [x, y] : edges) {
    for (int k = 0; k < n_theta; ++k) {
      const double rho = x * cos_t[std::size_t(k)] + y * sin_t[std::size_t(k)];
      const int r = int(std::lround(rho / params.rho_step)) + half_rho;
      if (r >= 0 && r < n_rho) ++at(k, r);
    }
  }

  // Neighbor lookup with wrap-around: theta + pi maps to mirrored rho.
  auto votes = [&](int k, int r) -> int {
    if (k < 0) {
      k += n_theta;
      r = n_rho - 1 - r;
    } else if (k >= n_theta) {
      k -= n_theta;
      r = n_rho - 1 - r;
    }
    if (r < 0 || r >= n_rho) return -1;
    return at(k, r);
  };

  struct Peak {
    int votes;
    int k, r;
  };
  std::vector<Peak> peaks;
  for (int k = 0; k < n_theta; ++k) {
    for (int r = 0; r < n_rho; ++r) {
      const int v = at(k, r);
      if (v < params.votes_min) continue;
      bool is_peak = true;
      for (int dk = -1; dk <= 1 && is_peak; ++dk) {
        for (int dr = -1; dr <= 1; ++dr) {
          if (dk == 0 && dr == 0) continue;
          const int nv = votes(k + dk, r + dr);
          // Strictly greater than earlier neighbors, at least equal to
          // later ones: exactly one peak survives per plateau.
          const bool earlier = dk < 0 || (dk == 0 && dr < 0);
          if (earlier ? nv >= v : nv > v) {
            is_peak = false;
            break;
          }
        }
      }
      if (is_peak) peaks.push_back({v, k, r});
    }
  }

  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.votes != b.votes) return a.votes > b.votes;
    if (a.k != b.k) return a.k < b.k;
    return a.r < b.r;
  });

  std::vector<DetectedLine> lines;
  lines.reserve(peaks.size());
  for (const auto& p : peaks) {
    double rho = double(p.r - half_rho) * params.rho_step;
    double theta = double(p.k) * params.theta_step;
    if (rho < 0.0) {
      rho = -rho;
      theta -= kPi; // into [-pi, 0)
    }
    lines.push_back({rho, theta});
  }
  return lines;
}

} // namespace mlog
