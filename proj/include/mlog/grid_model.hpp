#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mlog/types.hpp"

// Explicit projection model of one grid-line family: maps a hypothesized
// (sub-cell offset o, height h) to the predicted pixel distance of each
// labeled line from the image center, plus analytic derivatives.

namespace mlog {

/// Per-axis model parameters. `o` and `h` are the unknowns being solved
/// for; m, f and the per-axis mounting tilt eps_c are fixed.
struct AxisModelParams {
  double o = 0.0;    ///< sub-cell offset, meters, in [0, m)
  double h = 1.0;    ///< camera height, meters, > 0
  double m = 1.0;    ///< unit cell size along this axis, meters
  double f = 600.0;  ///< focal length, pixels
  double eps_c = 0.0; ///< mounting tilt for this axis, radians

  bool valid() const {
    return o >= 0.0 && o < m && h > 0.0 && m > 0.0 && f > 0.0;
  }
};

/// Ground offset where the optical axis meets the floor: s_p = h tan(eps_c).
/// Throws std::invalid_argument for h <= 0 or |eps_c| >= pi/2.
double principal_offset(double h, double eps_c);

/// Projection of a ground distance c (along the axis, camera position as
/// origin) into pixels: g(c) = c cos(phi) f / (cos(delta) h) with
/// phi = atan(c/h) and delta = phi - eps_c. Returns nullopt near the
/// projection singularity (|delta| -> pi/2, line at the horizon).
std::optional<double> project_ground_distance(double c, double h, double f,
                                              double eps_c);

/// Grid index of the line labeled j: i = j + floor((s_p - o)/m).
long label_to_index(long j, double o, double m, double s_p);

/// Predicted center-relative distance of the line labeled j:
/// rho_mod = g(s_i) - g(s_p) with s_i = m (i + 1) - o. Returns nullopt when
/// the line projects at the singularity.
std::optional<double> model_rho(long j, const AxisModelParams& p);

struct ResidualsJacobian {
  std::vector<double> residuals;    ///< pixels, one per usable line
  std::vector<double> d_res_d_o;    ///< pixels per meter
  std::vector<double> d_res_d_h;    ///< pixels per meter
  std::vector<int> used;            ///< indices of lines that were usable
};

/// Residual r_j = d_j - rho_mod(j) per labeled line, where d_j is the
/// line's signed center distance (`center` - rho_c), and the analytic
/// Jacobian with respect to (o, h). Lines at the projection singularity are
/// skipped; an empty result means the frame cannot be used.
ResidualsJacobian residuals_and_jacobian(std::span<const LabeledLine> lines,
                                         const AxisModelParams& p, double center);

} // namespace mlog
