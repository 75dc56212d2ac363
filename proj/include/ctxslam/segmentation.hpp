#pragma once

#include <span>
#include <vector>

#include "ctxslam/geometry.hpp"
#include "ctxslam/label_grid.hpp"
#include "ctxslam/landmark.hpp"
#include "ctxslam/max_margin.hpp"
#include "ctxslam/ontology.hpp"
#include "ctxslam/semantics.hpp"

namespace ctxslam {

// ---------------------------------------------------------------------------
// Recursive grid segmentation

struct GridParams {
  SemanticsParams semantics;
  double threshold = 0.7;
  int sparsity_floor = 4;  // landmarks needed to justify a split
  int max_depth = 3;       // 3x3 -> 6x6 -> 12x12 -> 24x24
};

struct GridSegment {
  Rect rect;
  int depth = 0;
  // Footprint on the 24x24 evaluation grid.
  int row0 = 0;
  int col0 = 0;
  int span = 0;
  std::vector<std::size_t> members;  // landmark indices
  EnvironmentDistribution distribution;
  std::vector<GridSegment> children;  // four quadrants or none

  bool is_leaf() const { return children.empty(); }
};

struct GridSegmentation {
  Rect bounds;
  std::vector<GridSegment> roots;  // the initial 3x3, row-major from the south-west

  std::vector<const GridSegment*> leaves() const;
};

// Starts from nine regions and splits a region into quadrants while its best
// probability is below the threshold, it is non-empty, it holds at least
// `sparsity_floor` landmarks and the depth cap is not reached.
GridSegmentation grid_segment(std::span<const Landmark> landmarks, const Rect& bounds,
                              const Ontology& ontology, const GridParams& params);

// ---------------------------------------------------------------------------
// N-nearest-neighbour branch segmentation

struct Fragment {
  std::vector<std::size_t> members;  // landmark indices, sorted
  Vec2 centroid;
  Polygon hull;
  EnvironmentDistribution distribution;
  std::vector<std::size_t> neighbours;  // fragment indices

  const std::string& label() const { return distribution.label; }
};

// Recomputes centroid, hull and distribution from the member set.
void refresh_fragment(Fragment& fragment, std::span<const Landmark> landmarks,
                      const Ontology& ontology, const SemanticsParams& params);

// Progressive clustering. Each cluster starts from the three unassigned
// landmarks nearest its centre and grows by the next-nearest unassigned
// landmark while the best probability does not drop. The first cluster is
// centred on `seed_position`; each later one on the unassigned landmark
// reached after skipping `momentum` landmarks outward from the previous
// cluster. Throws InvalidArgument for an empty map.
std::vector<Fragment> nnn_cluster(std::span<const Landmark> landmarks, const Ontology& ontology,
                                  const SemanticsParams& params, Vec2 seed_position,
                                  int momentum);

// Twice the mean nearest-neighbour spacing of the landmarks.
double default_adjacency_distance(std::span<const Landmark> landmarks);

// Fragments are neighbours when their hulls come closer than `adjacency`.
void compute_neighbours(std::vector<Fragment>& fragments, double adjacency);

// Merges connected components of same-label neighbours and recomputes the
// merged distributions. Neighbour lists are recomputed on the result.
std::vector<Fragment> merge_fragments(const std::vector<Fragment>& fragments,
                                      std::span<const Landmark> landmarks,
                                      const Ontology& ontology, const SemanticsParams& params,
                                      double adjacency);

// Landmark indices of one pair of crossing hull edges.
struct Bisection {
  std::size_t a1, a2, b1, b2;
  friend bool operator==(const Bisection&, const Bisection&) = default;
};

// Hull edges of `a` that intersect hull edges of `b`.
std::vector<Bisection> detect_bisection(const Fragment& a, const Fragment& b,
                                        std::span<const Landmark> landmarks);

// Reassigns every landmark of both fragments to the side of `h` it lies on
// (negative side -> a). Landmarks exactly on the line stay put.
void trade_landmarks(Fragment& a, Fragment& b, const Hyperplane& h,
                     std::span<const Landmark> landmarks, const Ontology& ontology,
                     const SemanticsParams& params);

struct BranchParams {
  SemanticsParams semantics;
  Vec2 seed_position;
  int momentum = 0;
  double adjacency_distance = 0.0;  // non-positive: default_adjacency_distance
  int max_trade_rounds = 4;
};

struct BranchSegmentation {
  std::vector<Fragment> fragments;
  double adjacency_distance = 0.0;
  int trades = 0;
};

// Cluster, merge same-label neighbours, then repair bisecting neighbour
// pairs with max-margin boundaries and trade landmarks across them.
BranchSegmentation branch_segment(std::span<const Landmark> landmarks, const Ontology& ontology,
                                  const BranchParams& params);

// ---------------------------------------------------------------------------
// Rasterisation onto the evaluation grid

// Leaves map exactly onto the 24x24 overlay.
LabelGrid rasterize(const GridSegmentation& segmentation);

// A cell takes the label of the fragment whose hull contains its centre
// (highest probability first when hulls overlap). A cell outside every hull
// that holds a fragment's landmark takes that fragment's label. All other
// cells stay Unknown.
LabelGrid rasterize(std::span<const Fragment> fragments, std::span<const Landmark> landmarks,
                    const Rect& bounds, int rows = kEvalGridSize, int cols = kEvalGridSize);

}  // namespace ctxslam
