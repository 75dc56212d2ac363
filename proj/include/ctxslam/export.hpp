#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ctxslam/landmark.hpp"
#include "ctxslam/segmentation.hpp"

namespace ctxslam {

// Labelled region as exported by either segmentation method.
struct LabelledRect {
  Rect rect;
  std::string label;
  double probability = 0.0;
};

struct LabelledPolygon {
  Polygon hull;
  std::string label;
  double probability = 0.0;
  std::vector<std::size_t> members;
};

// {"frame", "landmarks": [{id, class, confidence, x, y, true_x, true_y,
//   static, source_agent, observations, feature_id}]}
std::string landmarks_to_json(std::span<const Landmark> landmarks);
std::vector<Landmark> landmarks_from_json(std::string_view json_text);

// {"bounds": [x0, y0, x1, y1], "leaves": [{rect, depth, cells, label, probability,
//   members, distribution: {env: p}}]}
std::string grid_segmentation_to_json(const GridSegmentation& segmentation);
std::vector<LabelledRect> grid_leaves_from_json(std::string_view json_text);

// {"adjacency_distance", "trades", "fragments": [{members, hull, centroid,
//   label, probability, neighbours, distribution}]}
std::string fragments_to_json(const BranchSegmentation& segmentation);
std::vector<LabelledPolygon> fragments_from_json(std::string_view json_text);

}  // namespace ctxslam
