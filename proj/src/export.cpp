#include "ctxslam/export.hpp"

#include <nlohmann/json.hpp>

#include "ctxslam/error.hpp"

namespace ctxslam {

using nlohmann::ordered_json;

namespace {

ordered_json distribution_json(const EnvironmentDistribution& d) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < d.environments.size(); ++i) j[d.environments[i]] = d.probability[i];
  return j;
}

ordered_json parse(std::string_view text, std::string_view what) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

Vec2 point(const ordered_json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw ParseError("point must be [x, y]");
  return {v[0], v[1]};
}

}  // namespace

std::string landmarks_to_json(std::span<const Landmark> landmarks) {
  ordered_json doc;
  doc["frame"] = "collective";
  doc["landmarks"] = ordered_json::array();
  for (const auto& l : landmarks) {
    ordered_json j;
    j["id"] = l.id;
    j["class"] = l.feature_class;
    j["confidence"] = l.confidence;
    j["x"] = l.position.x;
    j["y"] = l.position.y;
    j["true_x"] = l.true_position.x;
    j["true_y"] = l.true_position.y;
    j["static"] = l.is_static;
    j["source_agent"] = l.source_agent;
    j["observations"] = l.observation_count;
    j["feature_id"] = l.feature_id;
    doc["landmarks"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::vector<Landmark> landmarks_from_json(std::string_view json_text) {
  const ordered_json doc = parse(json_text, "landmark map");
  std::vector<Landmark> out;
  try {
    for (const auto& j : doc.at("landmarks")) {
      Landmark l;
      l.id = j.at("id").get<std::uint32_t>();
      l.feature_class = j.at("class").get<std::string>();
      l.confidence = j.at("confidence").get<double>();
      l.position = {j.at("x").get<double>(), j.at("y").get<double>()};
      l.true_position = {j.value("true_x", l.position.x), j.value("true_y", l.position.y)};
      l.is_static = j.value("static", true);
      l.source_agent = j.value("source_agent", -1);
      l.observation_count = j.value("observations", 1);
      l.feature_id = j.value("feature_id", 0u);
      l.frame = Frame::Collective;
      out.push_back(std::move(l));
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("landmark map: ") + e.what());
  }
  return out;
}

std::string grid_segmentation_to_json(const GridSegmentation& segmentation) {
  ordered_json doc;
  const Rect& b = segmentation.bounds;
  doc["bounds"] = {b.min.x, b.min.y, b.max.x, b.max.y};
  doc["leaves"] = ordered_json::array();
  for (const GridSegment* leaf : segmentation.leaves()) {
    ordered_json j;
    j["rect"] = {leaf->rect.min.x, leaf->rect.min.y, leaf->rect.max.x, leaf->rect.max.y};
    j["depth"] = leaf->depth;
    j["cells"] = {leaf->row0, leaf->col0, leaf->span};
    j["label"] = leaf->distribution.label;
    j["probability"] = leaf->distribution.max_probability;
    j["members"] = leaf->members;
    j["distribution"] = distribution_json(leaf->distribution);
    doc["leaves"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::vector<LabelledRect> grid_leaves_from_json(std::string_view json_text) {
  const ordered_json doc = parse(json_text, "grid segmentation");
  std::vector<LabelledRect> out;
  try {
    for (const auto& j : doc.at("leaves")) {
      const auto r = j.at("rect").get<std::vector<double>>();
      if (r.size() != 4) throw ParseError("leaf rect must be [x0, y0, x1, y1]");
      out.push_back({Rect{{r[0], r[1]}, {r[2], r[3]}}, j.at("label").get<std::string>(),
                     j.value("probability", 0.0)});
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("grid segmentation: ") + e.what());
  }
  return out;
}

std::string fragments_to_json(const BranchSegmentation& segmentation) {
  ordered_json doc;
  doc["adjacency_distance"] = segmentation.adjacency_distance;
  doc["trades"] = segmentation.trades;
  doc["fragments"] = ordered_json::array();
  for (const auto& f : segmentation.fragments) {
    ordered_json j;
    j["members"] = f.members;
    j["hull"] = ordered_json::array();
    for (const Vec2 p : f.hull) j["hull"].push_back({p.x, p.y});
    j["centroid"] = {f.centroid.x, f.centroid.y};
    j["label"] = f.label();
    j["probability"] = f.distribution.max_probability;
    j["neighbours"] = f.neighbours;
    j["distribution"] = distribution_json(f.distribution);
    doc["fragments"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::vector<LabelledPolygon> fragments_from_json(std::string_view json_text) {
  const ordered_json doc = parse(json_text, "fragments");
  std::vector<LabelledPolygon> out;
  try {
    for (const auto& j : doc.at("fragments")) {
      LabelledPolygon f;
      for (const auto& p : j.at("hull")) f.hull.push_back(point(p));
      f.label = j.at("label").get<std::string>();
      f.probability = j.value("probability", 0.0);
      f.members = j.value("members", std::vector<std::size_t>{});
      out.push_back(std::move(f));
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("fragments: ") + e.what());
  }
  return out;
}

}  // namespace ctxslam
