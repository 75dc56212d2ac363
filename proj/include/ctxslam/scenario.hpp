#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctxslam/geometry.hpp"
#include "ctxslam/label_grid.hpp"
#include "ctxslam/ontology.hpp"

namespace ctxslam {

struct Zone {
  std::string environment;
  Polygon polygon;  // counter-clockwise ring
};

struct Feature {
  std::uint32_t id = 0;
  std::string feature_class;
  Vec2 position;
  bool is_static = true;
};

// Ground-truth world: a rectangle [0, width] x [0, height] (km) carved into
// environment zones and populated with typed features.
struct ScenarioSpec {
  std::string name;
  double width = 1.0;
  double height = 1.0;
  std::vector<Zone> zones;
  std::vector<Feature> features;
  std::uint64_t seed = 0;
  std::vector<Pose> agent_starts;

  Rect bounds() const { return Rect{{0.0, 0.0}, {width, height}}; }
  double area() const { return width * height; }
  std::size_t static_feature_count() const;
};

// Checks every invariant against the ontology; throws ParseError,
// InvalidArgument (out of bounds) or UnknownConcept.
void validate_scenario(const ScenarioSpec& spec, const Ontology& ontology);

// JSON scenario format:
//   { "name", "bounds": {"width", "height"}, "seed",
//     "zones": [{"env", "rect": [x0, y0, x1, y1]} | {"env", "polygon": [[x, y], ...]}],
//     "features": [{"id", "class", "x", "y", "static"?}],
//     "agent_starts": [{"x", "y", "heading"?}] }
// A feature's "static" flag defaults from its ontology class.
ScenarioSpec parse_scenario(std::string_view json_text, const Ontology& ontology);
ScenarioSpec load_scenario(const std::filesystem::path& path, const Ontology& ontology);
std::string scenario_to_json(const ScenarioSpec& spec);

struct GeneratorParams {
  std::string preset = "quadrant";
  // Features per km^2, one value per zone; a single value applies to every zone.
  // Empty means the preset's default density.
  std::vector<double> densities;
  std::uint64_t seed = 0;
  int agent_count = 3;
};

// Preset names accepted by generate_scenario.
const std::vector<std::string>& scenario_presets();

// Deterministic for fixed (params, ontology). Each zone receives
// round(density * zone area) features whose classes are drawn from the
// zone environment's members, weighted by semantic proximity.
// Throws InvalidArgument for an unknown preset or negative density.
ScenarioSpec generate_scenario(const GeneratorParams& params, const Ontology& ontology);

// Equidistant points on a circle about the centre (radius a quarter of the
// shorter side), each facing outward. A single agent starts at the centre.
std::vector<Pose> default_agent_starts(const Rect& bounds, int agent_count);

// Each cell takes the label of the first zone containing its centre, or Unknown.
LabelGrid ground_truth_grid(const ScenarioSpec& spec, int rows = kEvalGridSize,
                            int cols = kEvalGridSize);

}  // namespace ctxslam
