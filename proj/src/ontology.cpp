#include "ctxslam/ontology.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "ctxslam/error.hpp"
#include "ctxslam/io.hpp"

namespace ctxslam {

namespace {

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError("unknown key '" + key + "' in " + std::string(where));
  }
}

}  // namespace

const std::vector<std::string>& Ontology::axioms() {
  static const std::vector<std::string> names = {
      "environment names are unique and exclude Unknown",
      "feature class names are unique and disjoint from environments",
      "every feature class has at least one environment superclass",
      "every semantic proximity lies in (0, 1]",
      "superclass edges reference declared environments",
      "instances bind to declared concepts",
  };
  return names;
}

Ontology::Ontology(std::vector<std::string> environments, std::vector<FeatureClass> classes,
                   std::vector<Instance> instances)
    : environments_(std::move(environments)),
      classes_(std::move(classes)),
      instances_(std::move(instances)) {
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < environments_.size(); ++i) {
    const auto& e = environments_[i];
    if (e.empty() || e == kUnknown || !env_lookup_.emplace(e, i).second) bad.push_back(e);
  }
  if (!bad.empty())
    throw AxiomViolation("duplicate, empty or reserved environment names: " + join(bad));

  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& c = classes_[i];
    if (c.name.empty() || env_lookup_.contains(c.name) || c.name == kUnknown ||
        !class_lookup_.emplace(c.name, i).second)
      bad.push_back(c.name);
  }
  if (!bad.empty()) throw AxiomViolation("duplicate or clashing feature class names: " + join(bad));

  std::vector<std::string> unknown_env;
  std::vector<std::string> orphan;
  std::vector<std::string> out_of_range;
  proximity_.assign(classes_.size() * environments_.size(), 0.0);
  std::map<std::string, int> groups;
  group_id_.assign(classes_.size(), -1);
  for (std::size_t ci = 0; ci < classes_.size(); ++ci) {
    const auto& c = classes_[ci];
    if (c.superclasses.empty()) orphan.push_back(c.name);
    for (const auto& edge : c.superclasses) {
      const auto it = env_lookup_.find(edge.environment);
      if (it == env_lookup_.end()) {
        unknown_env.push_back(c.name + "->" + edge.environment);
        continue;
      }
      if (!(edge.proximity > 0.0 && edge.proximity <= 1.0)) {
        out_of_range.push_back(c.name + "->" + edge.environment);
        continue;
      }
      double& slot = proximity_[ci * environments_.size() + it->second];
      if (slot != 0.0) {
        bad.push_back(c.name + "->" + edge.environment);
        continue;
      }
      slot = edge.proximity;
    }
    if (c.similarity_group) {
      const auto [it, _] = groups.emplace(*c.similarity_group, static_cast<int>(groups.size()));
      group_id_[ci] = it->second;
    }
  }
  if (!unknown_env.empty())
    throw UnknownConcept("superclass edges reference undeclared environments: " + join(unknown_env));
  if (!out_of_range.empty())
    throw AxiomViolation("semantic proximity outside (0, 1]: " + join(out_of_range));
  if (!bad.empty()) throw AxiomViolation("duplicate superclass edges: " + join(bad));
  if (!orphan.empty())
    throw AxiomViolation("feature classes without an environment superclass: " + join(orphan));

  for (const auto& inst : instances_) {
    if (!class_lookup_.contains(inst.concept_name) && !env_lookup_.contains(inst.concept_name))
      bad.push_back(inst.name + ":" + inst.concept_name);
  }
  if (!bad.empty()) throw AxiomViolation("instances bound to undeclared concepts: " + join(bad));
}

std::vector<std::string> Ontology::environment_labels() const {
  auto labels = environments_;
  labels.emplace_back(kUnknown);
  return labels;
}

std::vector<std::string> Ontology::concepts() const {
  auto out = environments_;
  for (const auto& c : classes_) out.push_back(c.name);
  return out;
}

bool Ontology::has_class(std::string_view name) const {
  return class_lookup_.contains(std::string(name));
}

bool Ontology::has_environment(std::string_view name) const {
  return env_lookup_.contains(std::string(name));
}

std::size_t Ontology::class_index(std::string_view name) const {
  const auto it = class_lookup_.find(std::string(name));
  if (it == class_lookup_.end()) throw UnknownConcept("unknown feature class: " + std::string(name));
  return it->second;
}

std::size_t Ontology::environment_index(std::string_view name) const {
  const auto it = env_lookup_.find(std::string(name));
  if (it == env_lookup_.end()) throw UnknownConcept("unknown environment: " + std::string(name));
  return it->second;
}

const FeatureClass& Ontology::feature_class(std::string_view name) const {
  return classes_[class_index(name)];
}

double Ontology::semantic_proximity(std::string_view feature_class,
                                    std::string_view environment) const {
  const std::size_t ci = class_index(feature_class);
  if (environment == kUnknown) return 0.0;
  return proximity(ci, environment_index(environment));
}

std::set<std::string> Ontology::environment_superclasses(std::string_view feature_class) const {
  const std::size_t ci = class_index(feature_class);
  std::set<std::string> out;
  for (std::size_t e = 0; e < environments_.size(); ++e)
    if (proximity(ci, e) > 0.0) out.insert(environments_[e]);
  return out;
}

bool Ontology::semantically_similar(std::size_t a, std::size_t b) const {
  if (a == b) return true;
  return group_id_[a] >= 0 && group_id_[a] == group_id_[b];
}

bool Ontology::semantically_similar(std::string_view a, std::string_view b) const {
  return semantically_similar(class_index(a), class_index(b));
}

bool Ontology::is_static(std::string_view feature_class) const {
  return classes_[class_index(feature_class)].is_static;
}

std::map<std::string, std::string> Ontology::attributes(std::string_view concept_name) const {
  std::map<std::string, std::string> attrs;
  if (const auto it = class_lookup_.find(std::string(concept_name)); it != class_lookup_.end()) {
    const auto& c = classes_[it->second];
    attrs["kind"] = "feature_class";
    attrs["static"] = c.is_static ? "true" : "false";
    if (c.similarity_group) attrs["similarity_group"] = *c.similarity_group;
    return attrs;
  }
  if (env_lookup_.contains(std::string(concept_name)) || concept_name == kUnknown) {
    attrs["kind"] = "environment";
    return attrs;
  }
  throw UnknownConcept("unknown concept: " + std::string(concept_name));
}

Ontology parse_ontology(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("ontology: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw ParseError("ontology: top level must be an object");
    reject_unknown_keys(doc, {"environments", "feature_classes", "instances"}, "ontology");
    auto environments = doc.at("environments").get<std::vector<std::string>>();

    std::vector<FeatureClass> classes;
    for (const auto& fc : doc.at("feature_classes")) {
      reject_unknown_keys(fc, {"name", "static", "superclasses", "similarity_group"},
                          "feature class");
      FeatureClass c;
      c.name = fc.at("name").get<std::string>();
      c.is_static = fc.value("static", true);
      for (const auto& sc : fc.at("superclasses")) {
        reject_unknown_keys(sc, {"env", "sp"}, "superclass of " + c.name);
        c.superclasses.push_back({sc.at("env").get<std::string>(), sc.at("sp").get<double>()});
      }
      if (fc.contains("similarity_group") && !fc["similarity_group"].is_null())
        c.similarity_group = fc["similarity_group"].get<std::string>();
      classes.push_back(std::move(c));
    }

    std::vector<Instance> instances;
    if (doc.contains("instances")) {
      for (const auto& in : doc["instances"]) {
        reject_unknown_keys(in, {"name", "concept"}, "instance");
        instances.push_back({in.at("name").get<std::string>(), in.at("concept").get<std::string>()});
      }
    }
    return Ontology(std::move(environments), std::move(classes), std::move(instances));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ontology: ") + e.what());
  }
}

Ontology load_ontology(const std::filesystem::path& path) {
  return parse_ontology(read_text_file(path));
}

}  // namespace ctxslam
