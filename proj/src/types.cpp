#include "mlog/types.hpp"

#include <algorithm>

namespace mlog {

double max_speed(const GridSpec& grid, double fps, int eps_s) {
  if (!grid.valid()) throw std::invalid_argument("max_speed: invalid grid spec");
  if (fps <= 0.0) throw std::invalid_argument("max_speed: fps must be > 0");
  if (eps_s < 3)
    throw std::invalid_argument(
        "max_speed: speed factor below 3 makes the one-cell candidate set ambiguous");
  return std::min(grid.m_x, grid.m_y) * fps / double(eps_s);
}

} // namespace mlog
