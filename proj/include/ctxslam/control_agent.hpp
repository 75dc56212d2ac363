#pragma once

#include <map>
#include <span>
#include <vector>

#include "ctxslam/geometry.hpp"
#include "ctxslam/landmark.hpp"
#include "ctxslam/ontology.hpp"

namespace ctxslam {

struct MergeConfig {
  double merge_radius = 0.03;         // km
  double proximity_tolerance = 0.01;  // km
  // Stored similar discards needed near an incoming discard to resurrect
  // (the incoming one makes the group strictly larger than this).
  int resurrection_threshold = 2;
  double confidence_floor = 0.5;

  // Throws InvalidArgument when an invariant fails.
  void validate() const;
};

enum class MergeOutcome { Merged, Added, Discarded, Resurrected };

const char* to_string(MergeOutcome outcome);

struct DiscardEntry {
  Landmark landmark;
  double receipt_time = 0.0;
};

// Shared landmark map in the collective frame. After every merge_landmark
// call, no two semantically similar landmarks lie within the merge radius.
class CollectiveMap {
 public:
  CollectiveMap(const Ontology& ontology, MergeConfig config);

  // Throws InvalidArgument for a landmark not in the collective frame.
  MergeOutcome merge_landmark(const Landmark& incoming, double time = 0.0);
  // Applies merge_landmark in insertion order. Throws for an agent-local map.
  std::vector<MergeOutcome> merge_map(const LandmarkMap& edge_map, double time = 0.0);

  const std::vector<Landmark>& landmarks() const { return landmarks_; }
  const std::vector<DiscardEntry>& discards() const { return discards_; }
  const MergeConfig& config() const { return config_; }
  LandmarkMap snapshot() const;

 private:
  // Nearest similar landmark within the merge radius of `p`, excluding `skip`.
  std::ptrdiff_t nearest_similar(Vec2 p, const std::string& feature_class,
                                 std::ptrdiff_t skip = -1) const;
  // Merges landmark `idx` into similar neighbours until none remain in radius.
  void settle(std::size_t idx);
  static Landmark combine(const Landmark& a, const Landmark& b);
  bool similar(const std::string& a, const std::string& b) const;

  const Ontology* ontology_;
  MergeConfig config_;
  std::vector<Landmark> landmarks_;
  std::vector<DiscardEntry> discards_;
  std::uint32_t next_id_ = 0;
};

// Translates and rotates an agent-local map by the agent's known start pose.
LandmarkMap rebase_map(const LandmarkMap& edge_map, const Pose& start_pose);

struct IncentiveParams {
  double gain = 0.5;
  // Agents farther than this from the centre of mass get no incentive.
  // Non-positive means a quarter of the shorter bounds side.
  double distance_cap = 0.0;
};

// Unit vector away from the agents' global centre of mass, scaled by the
// gain. A single agent (or one sitting on the centre) gets zero.
std::vector<Vec2> dispersion_incentives(std::span<const Vec2> positions, const Rect& bounds,
                                        const IncentiveParams& params = {});

// Control agent: knows each edge agent's true start pose, rebases incoming
// snapshots and merges only the landmarks it has not yet received.
class ControlAgent {
 public:
  ControlAgent(const Ontology& ontology, MergeConfig config);

  void register_agent(int agent_id, const Pose& start);
  // Throws InvalidArgument for an unregistered agent.
  LandmarkMap rebase(const LandmarkMap& edge_map) const;
  // Merges static landmarks into the collective map and dynamic observations
  // into a separate observation map.
  void receive(const LandmarkMap& static_snapshot, const LandmarkMap& observation_snapshot,
               double time);

  const CollectiveMap& collective() const { return collective_; }
  const CollectiveMap& observations() const { return observations_; }

 private:
  std::map<int, Pose> starts_;
  std::map<int, std::size_t> static_cursor_;
  std::map<int, std::size_t> observation_cursor_;
  CollectiveMap collective_;
  CollectiveMap observations_;
};

}  // namespace ctxslam
