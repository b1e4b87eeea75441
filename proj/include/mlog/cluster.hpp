#pragma once

#include <span>
#include <vector>

#include "mlog/types.hpp"

// Univariate KDE clustering of rho within one parallel set: multiple
// detections of the same physical grid line merge into a single mean line.

namespace mlog {

struct ClusteredSet {
  /// (rho_mean, theta_mean) per cluster, sorted descending by rho_mean.
  std::vector<DetectedLine> lines;
};

/// Kernel density estimate at `query`: (1/(n b)) * sum K((query - rho_i)/b)
/// with K the standard normal density. Throws std::invalid_argument for an
/// empty sample set or b <= 0.
double kde_density(std::span<const double> rho_samples, double b, double query);

/// Clusters lines on rho. The density is evaluated on a 1 px grid over
/// [min rho - 3b, max rho + 3b]; the axis is cut at local minima whose
/// density falls below cluster_threshold_fraction * max density; each
/// interval becomes one cluster represented by its member means. The
/// bandwidth is cfg.kde_bandwidth_b scaled by (image diagonal / 800).
ClusteredSet cluster_rho(std::span<const DetectedLine> lines,
                         const PipelineConfig& cfg, const CameraModel& cam);

} // namespace mlog
