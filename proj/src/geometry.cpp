#include "ctxslam/geometry.hpp"

#include <algorithm>
#include <limits>

namespace ctxslam {

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

double signed_area(std::span<const Vec2> ring) {
  if (ring.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % ring.size()];
    twice += cross(a, b);
  }
  return 0.5 * twice;
}

bool polygon_contains(std::span<const Vec2> ring, Vec2 p) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[j];
    if (point_segment_distance(p, a, b) <= 1e-12) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

Rect bounding_box(std::span<const Vec2> pts) {
  if (pts.empty()) return {};
  Rect r{pts[0], pts[0]};
  for (const Vec2 p : pts) {
    r.min.x = std::min(r.min.x, p.x);
    r.min.y = std::min(r.min.y, p.y);
    r.max.x = std::max(r.max.x, p.x);
    r.max.y = std::max(r.max.y, p.y);
  }
  return r;
}

Polygon convex_hull(std::span<const Vec2> pts) {
  std::vector<Vec2> p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;

  Polygon hull(2 * p.size());
  std::size_t k = 0;
  for (const Vec2 q : p) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], q - hull[k - 2]) <= 0) --k;
    hull[k++] = q;
  }
  for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2 q = p[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], q - hull[k - 2]) <= 0) --k;
    hull[k++] = q;
  }
  hull.resize(k - 1);
  if (hull.size() < 3) {
    // All points collinear: keep the two extremes.
    return {p.front(), p.back()};
  }
  return hull;
}

double diameter(std::span<const Vec2> pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, distance(pts[i], pts[j]));
  return best;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

std::vector<std::pair<Vec2, Vec2>> hull_edges(std::span<const Vec2> hull) {
  std::vector<std::pair<Vec2, Vec2>> edges;
  if (hull.size() == 1) {
    edges.emplace_back(hull[0], hull[0]);
  } else if (hull.size() == 2) {
    edges.emplace_back(hull[0], hull[1]);
  } else {
    for (std::size_t i = 0; i < hull.size(); ++i)
      edges.emplace_back(hull[i], hull[(i + 1) % hull.size()]);
  }
  return edges;
}

}  // namespace

bool segments_intersect(Vec2 a1, Vec2 a2, Vec2 b1, Vec2 b2) {
  const int o1 = orientation(a1, a2, b1);
  const int o2 = orientation(a1, a2, b2);
  const int o3 = orientation(b1, b2, a1);
  const int o4 = orientation(b1, b2, a2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a1, a2, b1)) return true;
  if (o2 == 0 && on_segment(a1, a2, b2)) return true;
  if (o3 == 0 && on_segment(b1, b2, a1)) return true;
  if (o4 == 0 && on_segment(b1, b2, a2)) return true;
  return false;
}

Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  return distance(p, closest_point_on_segment(p, a, b));
}

bool hull_contains(std::span<const Vec2> hull, Vec2 p) {
  if (hull.size() < 3) return false;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 a = hull[i];
    const Vec2 b = hull[(i + 1) % hull.size()];
    if (cross(b - a, p - a) < 0) return false;
  }
  return true;
}

double hull_distance(std::span<const Vec2> hull_a, std::span<const Vec2> hull_b) {
  if (hull_a.empty() || hull_b.empty()) return std::numeric_limits<double>::infinity();
  const auto ea = hull_edges(hull_a);
  const auto eb = hull_edges(hull_b);
  for (const auto& [a1, a2] : ea)
    for (const auto& [b1, b2] : eb)
      if (segments_intersect(a1, a2, b1, b2)) return 0.0;
  if (hull_contains(hull_a, hull_b[0]) || hull_contains(hull_b, hull_a[0])) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  for (const Vec2 p : hull_a)
    for (const auto& [b1, b2] : eb) best = std::min(best, point_segment_distance(p, b1, b2));
  for (const Vec2 p : hull_b)
    for (const auto& [a1, a2] : ea) best = std::min(best, point_segment_distance(p, a1, a2));
  return best;
}

}  // namespace ctxslam
