#include "mlog/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlog {

double kde_density(std::span<const double> rho_samples, double b, double query) {
  if (rho_samples.empty())
    throw std::invalid_argument("kde_density: empty sample set");
  if (b <= 0.0) throw std::invalid_argument("kde_density: bandwidth must be > 0");
  const double inv_sqrt_2pi = 0.3989422804014326779;
  double sum = 0.0;
  for (double r : rho_samples) {
    const double z = (query - r) / b;
    sum += std::exp(-0.5 * z * z) * inv_sqrt_2pi;
  }
  return sum / (double(rho_samples.size()) * b);
}

ClusteredSet cluster_rho(std::span<const DetectedLine> lines,
                         const PipelineConfig& cfg, const CameraModel& cam) {
  ClusteredSet out;
  if (lines.empty()) return out;

  const double b = cfg.kde_bandwidth_b * (cam.diagonal() / 800.0);

  std::vector<double> rhos(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) rhos[i] = lines[i].rho;
  const auto [mn_it, mx_it] = std::minmax_element(rhos.begin(), rhos.end());

  const double lo = std::floor(*mn_it - 3.0 * b);
  const double hi = std::ceil(*mx_it + 3.0 * b);
  const std::size_t n_grid = std::size_t(hi - lo) + 1; // 1 px steps

  std::vector<double> density(n_grid);
  double max_density = 0.0;
  for (std::size_t g = 0; g < n_grid; ++g) {
    density[g] = kde_density(rhos, b, lo + double(g));
    max_density = std::max(max_density, density[g]);
  }
  const double eps_c = cfg.cluster_threshold_fraction * max_density;

  // Cut at local minima below the threshold; adjacent cut points collapse.
  std::vector<double> boundaries;
  bool in_run = false;
  for (std::size_t g = 1; g + 1 < n_grid; ++g) {
    const bool is_cut = density[g] <= density[g - 1] && density[g] <= density[g + 1] &&
                        density[g] < eps_c;
    if (is_cut && !in_run) boundaries.push_back(lo + double(g));
    in_run = is_cut;
  }

  const std::size_t n_clusters = boundaries.size() + 1;
  std::vector<double> sum_rho(n_clusters, 0.0), sum_theta(n_clusters, 0.0);
  std::vector<std::size_t> count(n_clusters, 0);
  for (const auto& l : lines) {
    const std::size_t c = std::size_t(
        std::upper_bound(boundaries.begin(), boundaries.end(), l.rho) -
        boundaries.begin());
    sum_rho[c] += l.rho;
    sum_theta[c] += l.theta;
    ++count[c];
  }
  for (std::size_t c = 0; c < n_clusters; ++c) {
    if (count[c] == 0) continue; // an empty interval between sparse samples
    out.lines.push_back({sum_rho[c] / double(count[c]), sum_theta[c] / double(count[c])});
  }
  std::sort(out.lines.begin(), out.lines.end(),
            [](const DetectedLine& a, const DetectedLine& b2) { return a.rho > b2.rho; });
  return out;
}

} // namespace mlog
