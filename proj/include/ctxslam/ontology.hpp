#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctxslam {

inline constexpr std::string_view kUnknown = "Unknown";

// Membership edge from a feature class to one of its environment superclasses,
// weighted by semantic proximity in (0, 1].
struct SuperclassEdge {
  std::string environment;
  double proximity = 0.0;
};

struct FeatureClass {
  std::string name;
  bool is_static = true;
  std::vector<SuperclassEdge> superclasses;
  std::optional<std::string> similarity_group;
};

struct Instance {
  std::string name;
  std::string concept_name;
};

// Knowledge base linking feature classes to environment types. The five
// parts are the concept set, typed relations (class -> environment
// membership with a proximity weight), per-concept attributes, named
// instances and the axioms checked at load time.
//
// Immutable once constructed; all queries are const and thread-safe.
class Ontology {
 public:
  // Validates every axiom; throws AxiomViolation listing offending concepts.
  Ontology(std::vector<std::string> environments, std::vector<FeatureClass> classes,
           std::vector<Instance> instances = {});

  // Declared environments, in file order. Never includes Unknown.
  const std::vector<std::string>& environments() const { return environments_; }
  // Declared environments followed by Unknown.
  std::vector<std::string> environment_labels() const;
  const std::vector<FeatureClass>& feature_classes() const { return classes_; }
  const std::vector<Instance>& instances() const { return instances_; }
  std::vector<std::string> concepts() const;
  std::size_t concept_count() const { return environments_.size() + classes_.size(); }
  // Names of the axioms this ontology satisfies.
  static const std::vector<std::string>& axioms();

  bool has_class(std::string_view name) const;
  bool has_environment(std::string_view name) const;
  const FeatureClass& feature_class(std::string_view name) const;

  // Dense indices for hot loops. Throw UnknownConcept.
  std::size_t class_index(std::string_view name) const;
  std::size_t environment_index(std::string_view name) const;
  double proximity(std::size_t class_idx, std::size_t env_idx) const {
    return proximity_[class_idx * environments_.size() + env_idx];
  }

  // Stored proximity, 0 when no relation exists. Unknown is accepted as an
  // environment and always yields 0.
  double semantic_proximity(std::string_view feature_class, std::string_view environment) const;
  std::set<std::string> environment_superclasses(std::string_view feature_class) const;
  bool semantically_similar(std::string_view a, std::string_view b) const;
  bool semantically_similar(std::size_t a, std::size_t b) const;
  bool is_static(std::string_view feature_class) const;

  // Attribute view of a concept (e.g. "static" -> "true").
  std::map<std::string, std::string> attributes(std::string_view concept_name) const;

 private:
  std::vector<std::string> environments_;
  std::vector<FeatureClass> classes_;
  std::vector<Instance> instances_;
  std::unordered_map<std::string, std::size_t> class_lookup_;
  std::unordered_map<std::string, std::size_t> env_lookup_;
  std::vector<double> proximity_;  // classes x environments
  std::vector<int> group_id_;      // -1 when the class declares no group
};

// Parses the JSON ontology format:
//   { "environments": [names],
//     "feature_classes": [{ "name", "static", "superclasses": [{ "env", "sp" }],
//                           "similarity_group"? }],
//     "instances"?: [{ "name", "concept" }] }
// Unknown keys are rejected.
Ontology parse_ontology(std::string_view json_text);
Ontology load_ontology(const std::filesystem::path& path);

}  // namespace ctxslam
