#include "socnav/grid_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

namespace socnav {

std::optional<GridPath> grid_dijkstra(const CollisionChecker& checker, Cell source, Cell target,
                                      const std::vector<double>& density) {
  const OccupancyGrid& grid = checker.dilated().grid();
  if (!grid.in_bounds(source.x, source.y) || !grid.in_bounds(target.x, target.y)) return std::nullopt;
  const std::size_t n = grid.cells.size();
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<std::uint8_t> free_mask(n, 0);
  for (int cy = 0; cy < grid.height; ++cy) {
    for (int cx = 0; cx < grid.width; ++cx) free_mask[grid.index(cx, cy)] = checker.is_free(grid.center(cx, cy)) ? 1 : 0;
  }
  const std::size_t src = grid.index(source.x, source.y);
  const std::size_t dst = grid.index(target.x, target.y);
  if (!free_mask[src] || !free_mask[dst]) return std::nullopt;

  std::vector<double> dist(n, inf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> done(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[src] = 0.0;
  open.push({0.0, src});

  static constexpr int kDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static constexpr int kDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  const double res = grid.resolution;
  const double diag = res * std::sqrt(2.0);

  while (!open.empty()) {
    const auto [d, idx] = open.top();
    open.pop();
    if (done[idx]) continue;
    done[idx] = 1;
    if (idx == dst) break;
    const int cx = static_cast<int>(idx % grid.width);
    const int cy = static_cast<int>(idx / grid.width);
    const Vec2 c = grid.center(cx, cy);
    for (int k = 0; k < 8; ++k) {
      const int nx = cx + kDx[k];
      const int ny = cy + kDy[k];
      if (!grid.in_bounds(nx, ny)) continue;
      const std::size_t nidx = grid.index(nx, ny);
      if (!free_mask[nidx] || done[nidx]) continue;
      const double step = (kDx[k] != 0 && kDy[k] != 0) ? diag : res;
      const double w = density.empty() ? 1.0 : density[nidx];
      const double nd = d + step * w;
      if (nd >= dist[nidx]) continue;
      if (!checker.segment_free(c, grid.center(nx, ny))) continue;
      dist[nidx] = nd;
      parent[nidx] = static_cast<std::int64_t>(idx);
      open.push({nd, nidx});
    }
  }
  if (!done[dst]) return std::nullopt;

  GridPath out;
  out.cost = dist[dst];
  for (std::int64_t at = static_cast<std::int64_t>(dst); at >= 0; at = parent[static_cast<std::size_t>(at)]) {
    out.cells.push_back({static_cast<int>(at % grid.width), static_cast<int>(at / grid.width)});
  }
  std::reverse(out.cells.begin(), out.cells.end());
  return out;
}

std::optional<Cell> anchor_cell(const CollisionChecker& checker, Vec2 p, int max_cells) {
  const OccupancyGrid& grid = checker.dilated().grid();
  const Cell home = grid.cell_of(p);
  std::optional<Cell> best;
  double best_d = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (int oy = -max_cells; oy <= max_cells; ++oy) {
    for (int ox = -max_cells; ox <= max_cells; ++ox) {
      const Cell c{home.x + ox, home.y + oy};
      if (!grid.in_bounds(c.x, c.y)) continue;
      const Vec2 cc = grid.center(c);
      const double d = distance(cc, p);
      const std::size_t idx = grid.index(c.x, c.y);
      if (d > best_d || (d == best_d && idx > best_idx)) continue;
      if (!checker.is_free(cc) || !checker.segment_free(p, cc)) continue;
      best = c;
      best_d = d;
      best_idx = idx;
    }
  }
  return best;
}

}  // namespace socnav
