#include "mlog/tracker.hpp"

#include <cmath>
#include <stdexcept>

namespace mlog {

long integrate_axis_cells(long cells_prev, double o_prev, double o_new, double m) {
  if (m <= 0.0) throw std::invalid_argument("integrate_axis: m must be > 0");
  // p_base = p_prev + o_new - o_prev keeps the same cell count; the
  // +-1 cell candidates cover a line crossing since the speed limit
  // guarantees less than one cell of motion per frame.
  const double delta = o_prev - o_new; // p_prev - p_base
  const double d_base = delta * delta;
  const double d_minus = (delta + m) * (delta + m);
  const double d_plus = (delta - m) * (delta - m);
  long cells = cells_prev;
  double best = d_base; // ties go to the base candidate
  if (d_minus < best) {
    best = d_minus;
    cells = cells_prev - 1;
  }
  if (d_plus < best) {
    cells = cells_prev + 1;
  }
  return cells;
}

double integrate_axis(double p_prev, double o_prev, double o_new, double m) {
  const long cells_prev = std::llround((p_prev - o_prev) / m);
  const long cells = integrate_axis_cells(cells_prev, o_prev, o_new, m);
  return double(cells) * m + o_new;
}

TrackerState update(const TrackerState& state, const FusedResult& frame,
                    const GridSpec& grid) {
  if (!frame.x_accepted && !frame.y_accepted)
    throw std::invalid_argument("tracker update requires an accepted axis");

  TrackerState next = state;
  if (!state.initialized) {
    // Relative localization: the first accepted offsets define the origin cell.
    next.cells_x = 0;
    next.cells_y = 0;
    next.prev_o_x = frame.o_x;
    next.prev_o_y = frame.o_y;
    next.initialized = true;
  } else {
    if (frame.x_accepted) {
      next.cells_x = integrate_axis_cells(state.cells_x, state.prev_o_x, frame.o_x, grid.m_x);
      next.prev_o_x = frame.o_x;
    }
    if (frame.y_accepted) {
      next.cells_y = integrate_axis_cells(state.cells_y, state.prev_o_y, frame.o_y, grid.m_y);
      next.prev_o_y = frame.o_y;
    }
  }
  next.frame_index = state.frame_index + 1;
  return next;
}

} // namespace mlog
