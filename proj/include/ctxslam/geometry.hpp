#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace ctxslam {

// Planar vector in kilometres.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}
inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

struct Pose {
  Vec2 position;
  double heading = 0.0;  // radians, counter-clockwise from +x
};

// Axis-aligned rectangle [min, max].
struct Rect {
  Vec2 min;
  Vec2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double area() const { return width() * height(); }
  double diagonal() const { return std::hypot(width(), height()); }
  Vec2 centre() const { return (min + max) * 0.5; }
  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

using Polygon = std::vector<Vec2>;

// Signed area via the shoelace formula; positive for counter-clockwise rings.
double signed_area(std::span<const Vec2> ring);

// Even-odd point-in-polygon test. Points on the boundary count as inside.
bool polygon_contains(std::span<const Vec2> ring, Vec2 p);

Rect bounding_box(std::span<const Vec2> pts);

// Andrew's monotone chain. Counter-clockwise, collinear points dropped.
// Returns the distinct points unchanged when fewer than three are non-collinear.
Polygon convex_hull(std::span<const Vec2> pts);

// Largest pairwise distance among the points (0 for fewer than two).
double diameter(std::span<const Vec2> pts);

// Closed-segment intersection, including touching and collinear overlap.
bool segments_intersect(Vec2 a1, Vec2 a2, Vec2 b1, Vec2 b2);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b);

// Minimum distance between two convex hulls (0 when they touch or overlap).
// Hulls of one or two points are treated as a point or a segment.
double hull_distance(std::span<const Vec2> hull_a, std::span<const Vec2> hull_b);

// Containment for a hull as returned by convex_hull. Degenerate hulls
// (fewer than three vertices) contain nothing.
bool hull_contains(std::span<const Vec2> hull, Vec2 p);

}  // namespace ctxslam
