#include "ctxslam/max_margin.hpp"

#include <limits>
#include <vector>

#include "ctxslam/error.hpp"

namespace ctxslam {

namespace {

struct ClosestPair {
  Vec2 a;
  Vec2 b;
  double dist = std::numeric_limits<double>::infinity();
};

std::vector<std::pair<Vec2, Vec2>> edges_of(const Polygon& hull) {
  std::vector<std::pair<Vec2, Vec2>> e;
  if (hull.size() == 1) e.emplace_back(hull[0], hull[0]);
  else if (hull.size() == 2) e.emplace_back(hull[0], hull[1]);
  else
    for (std::size_t i = 0; i < hull.size(); ++i) e.emplace_back(hull[i], hull[(i + 1) % hull.size()]);
  return e;
}

Hyperplane make_plane(Vec2 normal, double offset) {
  const double n = norm(normal);
  return Hyperplane{normal / n, offset / n, 0.0};
}

void score(const Hyperplane& h, std::span<const Vec2> a, std::span<const Vec2> b, int& errors,
           double& worst) {
  errors = 0;
  worst = std::numeric_limits<double>::infinity();
  for (const Vec2 p : a) {
    const double s = -h.signed_distance(p);
    if (s <= 0) ++errors;
    worst = std::min(worst, s);
  }
  for (const Vec2 p : b) {
    const double s = h.signed_distance(p);
    if (s <= 0) ++errors;
    worst = std::min(worst, s);
  }
}

}  // namespace

Hyperplane max_margin_boundary(std::span<const Vec2> points_a, std::span<const Vec2> points_b) {
  if (points_a.empty() || points_b.empty())
    throw InvalidArgument("max-margin boundary needs two non-empty point sets");
  const Polygon hull_a = convex_hull(points_a);
  const Polygon hull_b = convex_hull(points_b);
  if (hull_distance(hull_a, hull_b) <= 0.0) throw NotSeparable("point sets are not separable");

  ClosestPair best;
  const auto edges_a = edges_of(hull_a);
  const auto edges_b = edges_of(hull_b);
  for (const Vec2 p : hull_a)
    for (const auto& [s, t] : edges_b) {
      const Vec2 q = closest_point_on_segment(p, s, t);
      const double d = distance(p, q);
      if (d < best.dist) best = {p, q, d};
    }
  for (const Vec2 q : hull_b)
    for (const auto& [s, t] : edges_a) {
      const Vec2 p = closest_point_on_segment(q, s, t);
      const double d = distance(p, q);
      if (d < best.dist) best = {p, q, d};
    }

  const Vec2 w = (best.b - best.a) / best.dist;
  const Vec2 mid = (best.a + best.b) * 0.5;
  return Hyperplane{w, -dot(w, mid), best.dist / 2.0};
}

Hyperplane least_misclassification_boundary(std::span<const Vec2> points_a,
                                             std::span<const Vec2> points_b) {
  if (points_a.empty() || points_b.empty())
    throw InvalidArgument("boundary needs two non-empty point sets");

  Hyperplane best;
  int best_errors = std::numeric_limits<int>::max();
  double best_worst = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Hyperplane& h) {
    int errors = 0;
    double worst = 0.0;
    score(h, points_a, points_b, errors, worst);
    if (errors < best_errors || (errors == best_errors && worst > best_worst)) {
      best = h;
      best_errors = errors;
      best_worst = worst;
    }
  };

  for (const Vec2 p : points_a)
    for (const Vec2 q : points_b) {
      if (p == q) continue;
      const Vec2 w = q - p;
      consider(make_plane(w, -dot(w, (p + q) * 0.5)));
    }
  // Two support points on one side, one on the other.
  auto triples = [&](std::span<const Vec2> same, std::span<const Vec2> other, bool same_is_a) {
    for (std::size_t i = 0; i < same.size(); ++i)
      for (std::size_t j = i + 1; j < same.size(); ++j) {
        const Vec2 u = same[j] - same[i];
        if (norm(u) == 0.0) continue;
        Vec2 n{-u.y, u.x};
        n = n / norm(n);
        for (const Vec2 q : other) {
          Vec2 nn = n;
          const double side = dot(nn, q - same[i]);
          if (side == 0.0) continue;
          // Orient so the first set is negative.
          if ((side > 0) != same_is_a) nn = -nn;
          consider(Hyperplane{nn, -(dot(nn, same[i]) + dot(nn, q)) / 2.0, 0.0});
        }
      }
  };
  triples(points_a, points_b, true);
  triples(points_b, points_a, false);
  if (best_errors == std::numeric_limits<int>::max()) {
    // Every point coincides; any line through them will do.
    best = Hyperplane{{1.0, 0.0}, -points_a[0].x, 0.0};
  }
  best.margin = 0.0;
  return best;
}

}  // namespace ctxslam
