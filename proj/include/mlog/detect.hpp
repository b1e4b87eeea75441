#pragma once

#include <vector>

#include "mlog/image.hpp"
#include "mlog/types.hpp"

// Minimal standalone line detector so the pipeline can run end to end from
// images. A classic dense-accumulator Hough transform; the localization
// stages are independent of how lines are detected.

namespace mlog {

struct HoughParams {
  double rho_step = 1.0;           ///< pixels
  double theta_step = kPi / 180.0; ///< radians
  int votes_min = 2;
};

/// Binary edge map via central-difference gradient magnitude. Pixels whose
/// gradient exceeds `threshold` become 255, everything else 0. The one-pixel
/// border is always 0. Throws std::invalid_argument when the image is
/// smaller than 3x3 or the threshold is outside (0, 255).
GrayImage detect_edges(const GrayImage& img, double threshold);

/// Dense Hough transform over a binary image. Returns accumulator peaks
/// (8-neighborhood local maxima with at least `votes_min` votes) as lines
/// satisfying rho >= 0, -pi <= theta < pi. An empty edge image yields an
/// empty set. Deterministic for a fixed input.
std::vector<DetectedLine> hough_lines(const GrayImage& binary, const HoughParams& params);

} // namespace mlog
