#pragma once

#include <span>

#include "ctxslam/geometry.hpp"

namespace ctxslam {

// Oriented line w.p + b = 0 with unit normal w. Points of the first set
// passed to the solver lie on the negative side.
struct Hyperplane {
  Vec2 normal{1.0, 0.0};
  double offset = 0.0;
  double margin = 0.0;  // km, smallest distance from either set to the line

  double signed_distance(Vec2 p) const { return dot(normal, p) + offset; }
};

// Hard-margin linear separator maximising the minimum point-to-line
// distance. In the plane the optimum is the perpendicular bisector of the
// closest pair of points between the two convex hulls.
// Throws InvalidArgument for an empty set and NotSeparable when the hulls touch.
Hyperplane max_margin_boundary(std::span<const Vec2> points_a, std::span<const Vec2> points_b);

// Fallback for overlapping sets: among the support-candidate lines, the one
// misclassifying the fewest points, ties broken by the larger worst-case
// signed margin. `margin` is reported as 0.
Hyperplane least_misclassification_boundary(std::span<const Vec2> points_a,
                                             std::span<const Vec2> points_b);

}  // namespace ctxslam
