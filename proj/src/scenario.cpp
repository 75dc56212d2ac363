#include "ctxslam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>

#include "ctxslam/error.hpp"
#include "ctxslam/io.hpp"
#include "ctxslam/random.hpp"

namespace ctxslam {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError("unknown key '" + key + "' in " + std::string(where));
  }
}

Polygon rect_polygon(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// Zone layout in fractions of the bounds. An empty environment name means
// "the ontology's environment at `slot`".
struct PresetZone {
  std::string environment;
  int slot = -1;
  double x0, y0, x1, y1;
};

struct Preset {
  std::string name;
  double width;
  double height;
  double default_density;
  std::vector<PresetZone> zones;
};

const std::vector<Preset>& presets() {
  // Named area presets range from sparse (airport) to dense (city); zone
  // mixes are synthetic.
  static const std::vector<Preset> all = [] {
    std::vector<Preset> p;
    p.push_back({"uniform", 1.0, 1.0, 20.0, {{"", 0, 0, 0, 1, 1}}});
    p.push_back({"halves", 2.0, 1.0, 20.0, {{"", 0, 0, 0, 0.5, 1}, {"", 1, 0.5, 0, 1, 1}}});
    p.push_back({"quadrant",
                 2.0,
                 2.0,
                 30.0,
                 {{"", 0, 0, 0, 0.5, 0.5},
                  {"", 1, 0.5, 0, 1, 0.5},
                  {"", 2, 0, 0.5, 0.5, 1},
                  {"", 3, 0.5, 0.5, 1, 1}}});
    auto square = [](double area) { return std::sqrt(area); };
    p.push_back({"suburb",
                 square(29.5609),
                 square(29.5609),
                 10.0,
                 {{"Residential", -1, 0, 0, 0.4, 0.6},
                  {"HighDensityResidential", -1, 0.4, 0, 0.6, 0.6},
                  {"Commercial", -1, 0.6, 0, 1, 0.4},
                  {"Services", -1, 0.6, 0.4, 1, 0.6},
                  {"NonUrban", -1, 0, 0.6, 0.7, 1},
                  {"Transport", -1, 0.7, 0.6, 1, 1}}});
    p.push_back({"airport",
                 square(27.8891),
                 square(27.8891),
                 7.0,
                 {{"NonUrban", -1, 0, 0, 1, 0.7}, {"Transport", -1, 0, 0.7, 1, 1}}});
    p.push_back({"industrial",
                 square(6.6667),
                 square(6.6667),
                 25.0,
                 {{"Industrial", -1, 0, 0, 0.75, 1}, {"Commercial", -1, 0.75, 0, 1, 1}}});
    p.push_back({"lakeside",
                 square(0.5041),
                 square(0.5041),
                 120.0,
                 {{"Commercial", -1, 0, 0, 0.5, 1}, {"HighDensityResidential", -1, 0.5, 0, 1, 1}}});
    p.push_back({"depot",
                 square(1.0976),
                 square(1.0976),
                 60.0,
                 {{"Transport", -1, 0, 0, 0.6, 1}, {"Services", -1, 0.6, 0, 1, 1}}});
    p.push_back({"city",
                 1.35,
                 1.35,
                 238.0,
                 {{"Commercial", -1, 0, 0, 1, 0.8}, {"Services", -1, 0, 0.8, 1, 1}}});
    return p;
  }();
  return all;
}

}  // namespace

std::size_t ScenarioSpec::static_feature_count() const {
  return static_cast<std::size_t>(
      std::count_if(features.begin(), features.end(), [](const Feature& f) { return f.is_static; }));
}

void validate_scenario(const ScenarioSpec& spec, const Ontology& ontology) {
  if (!(spec.width > 0.0) || !(spec.height > 0.0))
    throw InvalidArgument("scenario bounds must be positive");
  const Rect b = spec.bounds();
  for (const auto& z : spec.zones) {
    if (z.environment != kUnknown && !ontology.has_environment(z.environment))
      throw UnknownConcept("zone references unknown environment: " + z.environment);
    if (z.polygon.size() < 3) throw ParseError("zone polygon needs at least 3 vertices");
  }
  std::vector<std::uint32_t> ids;
  for (const auto& f : spec.features) {
    if (!ontology.has_class(f.feature_class))
      throw UnknownConcept("feature " + std::to_string(f.id) +
                           " has unknown class: " + f.feature_class);
    if (!b.contains(f.position))
      throw InvalidArgument("feature " + std::to_string(f.id) + " lies outside the bounds");
    ids.push_back(f.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw ParseError("duplicate feature ids");
  for (const auto& s : spec.agent_starts)
    if (!b.contains(s.position)) throw InvalidArgument("agent start lies outside the bounds");
}

ScenarioSpec parse_scenario(std::string_view json_text, const Ontology& ontology) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  ScenarioSpec spec;
  try {
    reject_unknown_keys(doc, {"name", "bounds", "zones", "features", "agent_starts", "seed"},
                        "scenario");
    spec.name = doc.value("name", std::string("scenario"));
    const auto& bounds = doc.at("bounds");
    reject_unknown_keys(bounds, {"width", "height"}, "bounds");
    spec.width = bounds.at("width").get<double>();
    spec.height = bounds.at("height").get<double>();
    spec.seed = doc.value("seed", std::uint64_t{0});
    for (const auto& z : doc.value("zones", json::array())) {
      reject_unknown_keys(z, {"env", "rect", "polygon"}, "zone");
      Zone zone;
      zone.environment = z.at("env").get<std::string>();
      if (z.contains("rect")) {
        const auto r = z["rect"].get<std::vector<double>>();
        if (r.size() != 4) throw ParseError("zone rect needs 4 numbers");
        zone.polygon = rect_polygon(r[0], r[1], r[2], r[3]);
      } else {
        for (const auto& v : z.at("polygon")) {
          const auto xy = v.get<std::vector<double>>();
          if (xy.size() != 2) throw ParseError("polygon vertex needs 2 numbers");
          zone.polygon.push_back({xy[0], xy[1]});
        }
        if (signed_area(zone.polygon) < 0) std::reverse(zone.polygon.begin(), zone.polygon.end());
      }
      spec.zones.push_back(std::move(zone));
    }
    for (const auto& f : doc.value("features", json::array())) {
      reject_unknown_keys(f, {"id", "class", "x", "y", "static"}, "feature");
      Feature feat;
      feat.id = f.at("id").get<std::uint32_t>();
      feat.feature_class = f.at("class").get<std::string>();
      feat.position = {f.at("x").get<double>(), f.at("y").get<double>()};
      if (!ontology.has_class(feat.feature_class))
        throw UnknownConcept("feature " + std::to_string(feat.id) +
                             " has unknown class: " + feat.feature_class);
      feat.is_static = f.contains("static") ? f["static"].get<bool>()
                                            : ontology.is_static(feat.feature_class);
      spec.features.push_back(std::move(feat));
    }
    for (const auto& s : doc.value("agent_starts", json::array())) {
      reject_unknown_keys(s, {"x", "y", "heading"}, "agent start");
      spec.agent_starts.push_back(
          Pose{{s.at("x").get<double>(), s.at("y").get<double>()}, s.value("heading", 0.0)});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  validate_scenario(spec, ontology);
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path, const Ontology& ontology) {
  return parse_scenario(read_text_file(path), ontology);
}

std::string scenario_to_json(const ScenarioSpec& spec) {
  json doc;
  doc["name"] = spec.name;
  doc["bounds"] = {{"width", spec.width}, {"height", spec.height}};
  doc["seed"] = spec.seed;
  doc["zones"] = json::array();
  for (const auto& z : spec.zones) {
    json poly = json::array();
    for (const auto& v : z.polygon) poly.push_back({v.x, v.y});
    doc["zones"].push_back({{"env", z.environment}, {"polygon", poly}});
  }
  doc["features"] = json::array();
  for (const auto& f : spec.features) {
    doc["features"].push_back({{"id", f.id},
                               {"class", f.feature_class},
                               {"x", f.position.x},
                               {"y", f.position.y},
                               {"static", f.is_static}});
  }
  doc["agent_starts"] = json::array();
  for (const auto& s : spec.agent_starts)
    doc["agent_starts"].push_back(
        {{"x", s.position.x}, {"y", s.position.y}, {"heading", s.heading}});
  return doc.dump(2) + "\n";
}

const std::vector<std::string>& scenario_presets() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& p : presets()) n.push_back(p.name);
    return n;
  }();
  return names;
}

ScenarioSpec generate_scenario(const GeneratorParams& params, const Ontology& ontology) {
  const auto it = std::find_if(presets().begin(), presets().end(),
                               [&](const Preset& p) { return p.name == params.preset; });
  if (it == presets().end()) throw InvalidArgument("unknown preset: " + params.preset);
  const Preset& preset = *it;
  if (params.agent_count < 1) throw InvalidArgument("agent count must be at least 1");
  if (!params.densities.empty() && params.densities.size() != 1 &&
      params.densities.size() != preset.zones.size())
    throw InvalidArgument("preset " + preset.name + " has " + std::to_string(preset.zones.size()) +
                          " zones; got " + std::to_string(params.densities.size()) +
                          " densities");
  for (const double d : params.densities)
    if (!(d >= 0.0)) throw InvalidArgument("densities must be non-negative");

  ScenarioSpec spec;
  spec.name = preset.name;
  spec.width = preset.width;
  spec.height = preset.height;
  spec.seed = params.seed;

  for (const auto& pz : preset.zones) {
    Zone zone;
    if (pz.environment.empty()) {
      if (pz.slot >= static_cast<int>(ontology.environments().size()))
        throw InvalidArgument("preset " + preset.name + " needs at least " +
                              std::to_string(pz.slot + 1) + " environments");
      zone.environment = ontology.environments()[static_cast<std::size_t>(pz.slot)];
    } else {
      if (!ontology.has_environment(pz.environment))
        throw UnknownConcept("preset " + preset.name + " needs environment " + pz.environment);
      zone.environment = pz.environment;
    }
    zone.polygon = rect_polygon(pz.x0 * spec.width, pz.y0 * spec.height, pz.x1 * spec.width,
                                pz.y1 * spec.height);
    spec.zones.push_back(std::move(zone));
  }

  Rng rng(substream_seed(params.seed, "scenario"));
  std::uint32_t next_id = 0;
  for (std::size_t zi = 0; zi < spec.zones.size(); ++zi) {
    const Zone& zone = spec.zones[zi];
    const double density = params.densities.empty()       ? preset.default_density
                           : params.densities.size() == 1 ? params.densities[0]
                                                          : params.densities[zi];
    const double area = std::abs(signed_area(zone.polygon));
    const auto count = static_cast<std::size_t>(std::llround(density * area));
    if (count == 0) continue;

    const std::size_t env = ontology.environment_index(zone.environment);
    std::vector<std::size_t> members;
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t c = 0; c < ontology.feature_classes().size(); ++c) {
      const double sp = ontology.proximity(c, env);
      if (sp > 0.0) {
        members.push_back(c);
        weights.push_back(sp);
        total += sp;
      }
    }
    if (members.empty())
      throw InvalidArgument("environment " + zone.environment + " has no member feature classes");

    const Rect box = bounding_box(zone.polygon);
    for (std::size_t k = 0; k < count; ++k) {
      double pick = rng.uniform() * total;
      std::size_t chosen = members.back();
      for (std::size_t m = 0; m < members.size(); ++m) {
        if (pick < weights[m]) {
          chosen = members[m];
          break;
        }
        pick -= weights[m];
      }
      Vec2 p;
      do {
        p = {rng.uniform(box.min.x, box.max.x), rng.uniform(box.min.y, box.max.y)};
      } while (!polygon_contains(zone.polygon, p));
      const auto& fc = ontology.feature_classes()[chosen];
      spec.features.push_back(Feature{next_id++, fc.name, p, fc.is_static});
    }
  }

  spec.agent_starts = default_agent_starts(spec.bounds(), params.agent_count);
  validate_scenario(spec, ontology);
  return spec;
}

std::vector<Pose> default_agent_starts(const Rect& bounds, int agent_count) {
  if (agent_count < 1) throw InvalidArgument("agent count must be at least 1");
  const Vec2 centre = bounds.centre();
  const double radius = 0.25 * std::min(bounds.width(), bounds.height());
  std::vector<Pose> out;
  for (int a = 0; a < agent_count; ++a) {
    const double angle = 2.0 * std::numbers::pi * a / agent_count;
    const Vec2 pos = agent_count == 1 ? centre : centre + unit_from_angle(angle) * radius;
    out.push_back(Pose{pos, wrap_angle(angle)});
  }
  return out;
}

LabelGrid ground_truth_grid(const ScenarioSpec& spec, int rows, int cols) {
  LabelGrid grid(rows, cols);
  const Rect b = spec.bounds();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const Vec2 centre = LabelGrid::cell_rect(b, rows, cols, r, c).centre();
      for (const auto& z : spec.zones) {
        if (polygon_contains(z.polygon, centre)) {
          grid.set(r, c, z.environment, 1.0);
          break;
        }
      }
    }
  return grid;
}

}  // namespace ctxslam
