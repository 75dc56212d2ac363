#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "ctxslam/geometry.hpp"
#include "ctxslam/landmark.hpp"
#include "ctxslam/ontology.hpp"
#include "ctxslam/random.hpp"
#include "ctxslam/scenario.hpp"

namespace ctxslam {

// Parametric detector standing in for the object-detection network.
struct SensorParams {
  double range = 0.08;                            // km
  double field_of_view = 2.0 * std::numbers::pi / 3.0;  // rad
  double p_detect = 0.9;
  double sigma_range = 0.002;    // km
  double sigma_bearing = 0.01;   // rad
  double confidence_min = 0.5;
  double confidence_max = 1.0;

  // Effective swath W for the A' = V W t coverage estimate.
  double sweep_width() const;
};

struct MotionParams {
  double speed = 0.01;                          // km per simulated second
  double max_turn = std::numbers::pi / 6.0;     // random-walk turn bound, rad
  double incentive_weight = 1.0;
  double acquisition_distance = 0.01;           // km
  int step_budget = 500;
  double sigma_drift = 0.0;                     // km per step, per axis
};

inline constexpr double kStepSeconds = 1.0;

struct Detection {
  std::uint32_t feature_id = 0;
  std::string feature_class;
  double confidence = 0.0;
  double range = 0.0;    // km, measured
  double bearing = 0.0;  // rad relative to heading, measured
  bool is_static = true;
  Vec2 true_position;
};

enum class Mobility { Static, Dynamic };

struct Target {
  std::uint32_t feature_id = 0;
  std::string feature_class;
  double confidence = 0.0;
  int steps = 0;
};

struct AgentState {
  int id = 0;
  Pose start_pose;
  Pose true_pose;
  Pose believed_pose;
  SensorParams sensor;
  MotionParams motion;
  Vec2 drift_bias;
  LandmarkMap local_map;     // static landmarks only, agent-local frame
  LandmarkMap observations;  // dynamic observations, agent-local frame
  std::optional<Target> target;
  std::set<std::uint32_t> known_features;  // acquired here or reported by the control agent
  std::uint32_t next_landmark_id = 0;

  AgentState() = default;
  AgentState(int agent_id, Pose start, SensorParams sensor_params, MotionParams motion_params);
};

// Every feature in range and field of view appears with probability p_detect.
// Range and bearing carry zero-mean Gaussian noise; range is clamped to the
// sensor range. Output follows the scenario's feature order.
std::vector<Detection> sense(const ScenarioSpec& world, const AgentState& agent, Rng& rng);

Mobility classify_static_dynamic(const Ontology& ontology, const Detection& detection);

struct DetectionPartition {
  std::vector<Detection> static_detections;
  std::vector<Detection> dynamic_detections;
};
DetectionPartition partition_detections(const Ontology& ontology,
                                        std::span<const Detection> detections);

// Closest static detection not already known to the agent. Ties resolve by
// smaller absolute bearing, then lower feature id.
std::optional<Detection> select_target(std::span<const Detection> detections,
                                       const AgentState& agent);

enum class ApproachStatus { InProgress, Acquired, Abandoned };

struct ApproachResult {
  ApproachStatus status = ApproachStatus::InProgress;
  std::optional<Landmark> landmark;
};

// One simulated second of target pursuit: re-measure the target, acquire it
// when within the acquisition distance, otherwise steer onto the measured
// bearing and advance. Does not apply drift.
ApproachResult approach_step(AgentState& agent, const ScenarioSpec& world, Rng& rng);

// Pursues `target` until acquisition or the step budget runs out, applying
// drift after every move. Returns the inserted landmark, or nullopt when abandoned.
std::optional<Landmark> approach_and_acquire(AgentState& agent, const Detection& target,
                                             const ScenarioSpec& world, Rng& rng);

// Heading = blend of a bounded random turn and the incentive direction;
// advances V * dt and reflects off the bounds. Updates and returns the true pose.
Pose random_walk_step(AgentState& agent, Vec2 incentive, const Rect& bounds, Rng& rng);

// Adds one Gaussian increment to the accumulated bias and refreshes the
// believed pose as true pose + bias.
Pose apply_drift(AgentState& agent, Rng& rng);

// Snaps every landmark believed within `threshold` km of its true position
// onto the truth and removes the mean snapped residual from the drift bias.
// Returns the number of landmarks snapped.
std::size_t oracle_correct(AgentState& agent, double threshold);

// Records a dynamic detection in the observation log (one entry per feature).
void log_observation(AgentState& agent, const Detection& detection);

// Believed collective-frame position of a detection.
Vec2 believed_detection_position(const AgentState& agent, const Detection& detection);

}  // namespace ctxslam
