#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ctxslam/export.hpp"
#include "ctxslam/label_grid.hpp"
#include "ctxslam/landmark.hpp"
#include "ctxslam/scenario.hpp"

namespace ctxslam {

struct Color {
  std::uint8_t r = 0, g = 0, b = 0;

  std::uint8_t gray() const;  // Rec. 601 luma
  std::string hex() const;    // "#rrggbb"
  friend bool operator==(const Color&, const Color&) = default;
};

using Palette = std::map<std::string, Color>;

// Fixed colours in environment order, white for Unknown.
Palette default_palette(std::span<const std::string> environments);
// {"label": "#rrggbb", ...}
Palette parse_palette(std::string_view json_text);

enum class ImageFormat { Pgm, Svg };

struct RenderLayers {
  bool truth_zones = true;
  bool landmarks = true;
  bool true_positions = false;
  bool grid_leaves = true;
  bool fragments = true;
  bool overlay = true;  // 24x24 evaluation grid lines
};

struct RenderSpec {
  RenderLayers layers;
  Palette palette;
  ImageFormat format = ImageFormat::Pgm;
  double scale = 200.0;  // px per km, vector output
  int cell_pixels = 10;  // px per grid cell, raster output
  int gap = 10;          // px between side-by-side panels

  // Throws InvalidArgument for a non-positive scale or cell size.
  void validate() const;
};

// Binary PGM of one or more label grids placed left to right, separated by
// white gaps. Throws InvalidArgument when the palette lacks a label present
// in a grid, or when the panels differ in height.
std::string render_pgm(std::span<const LabelGrid> panels, const RenderSpec& spec);

struct VectorScene {
  Rect bounds;
  std::vector<Zone> zones;
  std::vector<Landmark> landmarks;
  std::vector<LabelledRect> leaves;
  std::vector<LabelledPolygon> fragments;
};

// SVG of the selected layers; north is up. Palette coverage is checked for
// every label drawn.
std::string render_svg(const VectorScene& scene, const RenderSpec& spec);

}  // namespace ctxslam
