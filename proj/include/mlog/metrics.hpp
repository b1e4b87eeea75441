#pragma once

#include <array>
#include <span>
#include <vector>

// Evaluation statistics: per-state mean error, RMSE, SD and the 5x5 error
// correlation matrix, in the fixed state order X, Y, Z, Pitch, Roll.

namespace mlog {

struct PoseSample {
  double x = 0.0, y = 0.0, z = 0.0;
  double pitch_deg = 0.0, roll_deg = 0.0;
};

inline constexpr std::array<const char*, 5> kStateNames = {"X", "Y", "Z", "Pitch",
                                                           "Roll"};

struct ErrorReport {
  std::array<double, 5> mean{};
  std::array<double, 5> rmse{};
  std::array<double, 5> sd{}; ///< sample (n-1) standard deviation
  std::array<std::array<double, 5>, 5> correlation{};
  std::array<bool, 5> zero_variance{}; ///< correlation rows flagged as 0
  std::size_t n_frames = 0;
};

/// Elementwise errors (estimate - truth) per state, their mean/RMSE/SD and
/// the Pearson correlation matrix of the error series. Position errors are
/// in meters, angle errors in degrees. Series must be aligned by index and
/// contain at least 2 samples; zero-variance states get zero correlation
/// off-diagonal and a flag. Throws std::invalid_argument on length
/// mismatch or short input.
ErrorReport compute_report(std::span<const PoseSample> estimates,
                           std::span<const PoseSample> truth);

} // namespace mlog
