#pragma once

#include <cstdint>

#include "mlog/subcell.hpp"
#include "mlog/types.hpp"

// Winner-take-all integration of per-frame sub-cell offsets into a
// continuous position over the grid. Localization is relative to the
// first accepted frame.

namespace mlog {

struct TrackerState {
  // Integrated position per axis is kept as (whole cells, offset) so the
  // invariant p mod m == o holds exactly.
  long cells_x = 0, cells_y = 0;
  double prev_o_x = 0.0, prev_o_y = 0.0;
  std::int64_t frame_index = 0;
  bool initialized = false;

  double p_x(const GridSpec& g) const { return double(cells_x) * g.m_x + prev_o_x; }
  double p_y(const GridSpec& g) const { return double(cells_y) * g.m_y + prev_o_y; }
};

/// One-axis WTA update: p_base = p_prev + o_new - o_prev; the candidates
/// {p_base - m, p_base, p_base + m} cover a one-cell ambiguity, and the one
/// closest to p_prev wins (ties toward p_base). Returns the chosen
/// candidate's whole-cell count; the fractional part is o_new by
/// construction.
long integrate_axis_cells(long cells_prev, double o_prev, double o_new, double m);

/// Convenience wrapper returning the updated continuous position.
double integrate_axis(double p_prev, double o_prev, double o_new, double m);

/// Applies the fused per-frame result. Rejected axes keep the previous
/// cell count and offset. The first accepted frame initializes p = o.
TrackerState update(const TrackerState& state, const FusedResult& frame,
                    const GridSpec& grid);

} // namespace mlog
