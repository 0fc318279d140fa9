#pragma once

#include <optional>
#include <vector>

#include "socnav/collision.hpp"

namespace socnav {

struct GridPath {
  std::vector<Cell> cells;
  double cost = 0.0;
};

// 8-connected Dijkstra between free cell centers. A move is allowed when the
// straight segment between the two centers is collision-free. Step cost is
// step_length * density[target] (density empty means 1). Ties in the queue
// are broken by row-major cell index.
std::optional<GridPath> grid_dijkstra(const CollisionChecker& checker, Cell source, Cell target,
                                      const std::vector<double>& density = {});

// Nearest free cell center (by Euclidean distance, then row-major index)
// joined to p by a free segment, searched within max_cells rings.
std::optional<Cell> anchor_cell(const CollisionChecker& checker, Vec2 p, int max_cells = 6);

}  // namespace socnav
