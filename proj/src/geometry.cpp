#include "socnav/geometry.hpp"

#include <algorithm>

namespace socnav {

namespace {

// Point at arc length s along pts, walking forward from segment `seg` whose
// start lies at cumulative length `seg_start`.
struct ArcCursor {
  const std::vector<Vec2>& pts;
  std::size_t seg = 0;
  double seg_start = 0.0;

  Vec2 at(double s) {
    while (seg + 1 < pts.size()) {
      const double len = distance(pts[seg], pts[seg + 1]);
      if (s <= seg_start + len || seg + 2 == pts.size()) {
        if (len == 0.0) return pts[seg + 1];
        const double t = std::clamp((s - seg_start) / len, 0.0, 1.0);
        return lerp(pts[seg], pts[seg + 1], t);
      }
      seg_start += len;
      ++seg;
    }
    return pts.back();
  }
};

}  // namespace

std::vector<Vec2> resample_by_spacing(const std::vector<Vec2>& pts, double spacing) {
  if (pts.empty()) return {};
  const double total = polyline_length(pts);
  std::vector<Vec2> out;
  out.push_back(pts.front());
  if (total == 0.0 || spacing <= 0.0) {
    if (pts.size() > 1 && !(pts.back() == pts.front())) out.push_back(pts.back());
    return out;
  }
  ArcCursor cursor{pts};
  for (long k = 1;; ++k) {
    const double s = static_cast<double>(k) * spacing;
    if (s > total + 1e-9) break;
    out.push_back(cursor.at(std::min(s, total)));
  }
  if (distance(out.back(), pts.back()) > 1e-9) out.push_back(pts.back());
  return out;
}

std::vector<Vec2> resample_uniform(const std::vector<Vec2>& pts, int count, std::vector<std::size_t>* segments) {
  if (segments) segments->clear();
  if (pts.empty() || count <= 0) return {};
  if (count == 1) {
    if (segments) segments->push_back(0);
    return {pts.front()};
  }
  const double total = polyline_length(pts);
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(count));
  ArcCursor cursor{pts};
  for (int k = 0; k + 1 < count; ++k) {
    out.push_back(cursor.at(total * static_cast<double>(k) / static_cast<double>(count - 1)));
    if (segments) segments->push_back(cursor.seg);
  }
  out.push_back(pts.back());
  if (segments) segments->push_back(pts.size() > 1 ? pts.size() - 2 : 0);
  return out;
}

}  // namespace socnav
