#include "mlog/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace mlog {

ErrorReport compute_report(std::span<const PoseSample> estimates,
                           std::span<const PoseSample> truth) {
  if (estimates.size() != truth.size())
    throw std::invalid_argument("compute_report: series length mismatch (" +
                                std::to_string(estimates.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  const std::size_t n = estimates.size();
  if (n < 2) throw std::invalid_argument("compute_report: need at least 2 samples");

  auto state_of = [](const PoseSample& p, int s) {
    switch (s) {
      case 0: return p.x;
      case 1: return p.y;
      case 2: return p.z;
      case 3: return p.pitch_deg;
      default: return p.roll_deg;
    }
  };

  std::array<std::vector<double>, 5> err;
  for (int s = 0; s < 5; ++s) {
    err[std::size_t(s)].resize(n);
    for (std::size_t k = 0; k < n; ++k)
      err[std::size_t(s)][k] = state_of(estimates[k], s) - state_of(truth[k], s);
  }

  ErrorReport rep;
  rep.n_frames = n;
  std::array<double, 5> var{};
  for (int s = 0; s < 5; ++s) {
    const auto& e = err[std::size_t(s)];
    double mean = 0.0, sq = 0.0;
    for (double v : e) {
      mean += v;
      sq += v * v;
    }
    mean /= double(n);
    rep.mean[std::size_t(s)] = mean;
    rep.rmse[std::size_t(s)] = std::sqrt(sq / double(n));
    double ss = 0.0;
    for (double v : e) ss += (v - mean) * (v - mean);
    var[std::size_t(s)] = ss; // n * biased variance
    rep.sd[std::size_t(s)] = std::sqrt(ss / double(n - 1));
    rep.zero_variance[std::size_t(s)] = ss < 1e-24;
  }

  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      if (a == b) {
        rep.correlation[std::size_t(a)][std::size_t(b)] = 1.0;
        continue;
      }
      if (rep.zero_variance[std::size_t(a)] || rep.zero_variance[std::size_t(b)]) {
        rep.correlation[std::size_t(a)][std::size_t(b)] = 0.0;
        continue;
      }
      double cov = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        cov += (err[std::size_t(a)][k] - rep.mean[std::size_t(a)]) *
               (err[std::size_t(b)][k] - rep.mean[std::size_t(b)]);
      rep.correlation[std::size_t(a)][std::size_t(b)] =
          cov / std::sqrt(var[std::size_t(a)] * var[std::size_t(b)]);
    }
  }
  return rep;
}

} // namespace mlog
