#include "ctxslam/edge_agent.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace ctxslam {

std::vector<Vec2> positions_of(std::span<const Landmark> landmarks) {
  std::vector<Vec2> out;
  out.reserve(landmarks.size());
  for (const auto& l : landmarks) out.push_back(l.position);
  return out;
}

double SensorParams::sweep_width() const {
  if (field_of_view >= std::numbers::pi) return 2.0 * range;
  return 2.0 * range * std::sin(field_of_view / 2.0);
}

AgentState::AgentState(int agent_id, Pose start, SensorParams sensor_params,
                       MotionParams motion_params)
    : id(agent_id),
      start_pose(start),
      true_pose(start),
      believed_pose(start),
      sensor(sensor_params),
      motion(motion_params) {
  local_map.frame = Frame::AgentLocal;
  local_map.owner = agent_id;
  observations.frame = Frame::AgentLocal;
  observations.owner = agent_id;
}

namespace {

const Feature* find_feature(const ScenarioSpec& world, std::uint32_t id) {
  if (id < world.features.size() && world.features[id].id == id) return &world.features[id];
  for (const auto& f : world.features)
    if (f.id == id) return &f;
  return nullptr;
}

struct Measurement {
  double range;
  double bearing;
};

Measurement measure(const AgentState& agent, Vec2 feature_pos, Rng& rng) {
  const Vec2 offset = feature_pos - agent.true_pose.position;
  const double r = norm(offset);
  const double b = wrap_angle(std::atan2(offset.y, offset.x) - agent.true_pose.heading);
  const double nr = r + rng.normal(0.0, agent.sensor.sigma_range);
  const double nb = b + rng.normal(0.0, agent.sensor.sigma_bearing);
  return {std::clamp(nr, 0.0, std::max(agent.sensor.range, r)), wrap_angle(nb)};
}

// Moves the true pose by `step` along the current heading, reflecting off the bounds.
void advance(AgentState& agent, double step, const Rect& bounds) {
  Vec2 p = agent.true_pose.position + unit_from_angle(agent.true_pose.heading) * step;
  double h = agent.true_pose.heading;
  if (p.x < bounds.min.x) {
    p.x = 2 * bounds.min.x - p.x;
    h = std::numbers::pi - h;
  } else if (p.x > bounds.max.x) {
    p.x = 2 * bounds.max.x - p.x;
    h = std::numbers::pi - h;
  }
  if (p.y < bounds.min.y) {
    p.y = 2 * bounds.min.y - p.y;
    h = -h;
  } else if (p.y > bounds.max.y) {
    p.y = 2 * bounds.max.y - p.y;
    h = -h;
  }
  p.x = std::clamp(p.x, bounds.min.x, bounds.max.x);
  p.y = std::clamp(p.y, bounds.min.y, bounds.max.y);
  agent.true_pose.position = p;
  agent.true_pose.heading = wrap_angle(h);
}

Vec2 believed_position_from(const AgentState& agent, double range, double bearing) {
  return agent.believed_pose.position +
         unit_from_angle(agent.believed_pose.heading + bearing) * range;
}

}  // namespace

std::vector<Detection> sense(const ScenarioSpec& world, const AgentState& agent, Rng& rng) {
  std::vector<Detection> out;
  const double half_fov = agent.sensor.field_of_view / 2.0;
  for (const auto& f : world.features) {
    const Vec2 offset = f.position - agent.true_pose.position;
    const double r = norm(offset);
    if (r > agent.sensor.range) continue;
    const double b = wrap_angle(std::atan2(offset.y, offset.x) - agent.true_pose.heading);
    if (std::abs(b) > half_fov) continue;
    if (!rng.bernoulli(agent.sensor.p_detect)) continue;
    const Measurement m = measure(agent, f.position, rng);
    Detection d;
    d.feature_id = f.id;
    d.feature_class = f.feature_class;
    d.confidence = rng.uniform(agent.sensor.confidence_min, agent.sensor.confidence_max);
    d.range = std::min(m.range, agent.sensor.range);
    d.bearing = m.bearing;
    d.is_static = f.is_static;
    d.true_position = f.position;
    out.push_back(std::move(d));
  }
  return out;
}

Mobility classify_static_dynamic(const Ontology& ontology, const Detection& detection) {
  return ontology.is_static(detection.feature_class) ? Mobility::Static : Mobility::Dynamic;
}

DetectionPartition partition_detections(const Ontology& ontology,
                                        std::span<const Detection> detections) {
  DetectionPartition out;
  for (const auto& d : detections) {
    if (classify_static_dynamic(ontology, d) == Mobility::Static)
      out.static_detections.push_back(d);
    else
      out.dynamic_detections.push_back(d);
  }
  return out;
}

std::optional<Detection> select_target(std::span<const Detection> detections,
                                       const AgentState& agent) {
  const Detection* best = nullptr;
  for (const auto& d : detections) {
    if (!d.is_static || agent.known_features.contains(d.feature_id)) continue;
    if (best == nullptr) {
      best = &d;
      continue;
    }
    const auto key = [](const Detection& x) {
      return std::tuple(x.range, std::abs(x.bearing), x.feature_id);
    };
    if (key(d) < key(*best)) best = &d;
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

ApproachResult approach_step(AgentState& agent, const ScenarioSpec& world, Rng& rng) {
  if (!agent.target) return {ApproachStatus::Abandoned, std::nullopt};
  Target& target = *agent.target;
  const Feature* feature = find_feature(world, target.feature_id);
  if (feature == nullptr) {
    agent.target.reset();
    return {ApproachStatus::Abandoned, std::nullopt};
  }

  const Measurement m = measure(agent, feature->position, rng);
  if (m.range <= agent.motion.acquisition_distance) {
    Landmark l;
    l.id = agent.next_landmark_id++;
    l.feature_class = target.feature_class;
    l.confidence = target.confidence;
    l.position = collective_to_local(believed_position_from(agent, m.range, m.bearing),
                                     agent.start_pose);
    l.true_position = feature->position;
    l.is_static = true;
    l.source_agent = agent.id;
    l.feature_id = feature->id;
    l.frame = Frame::AgentLocal;
    agent.local_map.landmarks.push_back(l);
    agent.known_features.insert(feature->id);
    agent.target.reset();
    return {ApproachStatus::Acquired, l};
  }
  if (target.steps >= agent.motion.step_budget) {
    agent.target.reset();
    return {ApproachStatus::Abandoned, std::nullopt};
  }

  // Proportional steering with unit gain keeps the target centred in view.
  agent.true_pose.heading = wrap_angle(agent.true_pose.heading + m.bearing);
  const double step = std::min(agent.motion.speed * kStepSeconds,
                               std::max(0.0, m.range - 0.5 * agent.motion.acquisition_distance));
  advance(agent, step, world.bounds());
  ++target.steps;
  return {ApproachStatus::InProgress, std::nullopt};
}

std::optional<Landmark> approach_and_acquire(AgentState& agent, const Detection& target,
                                             const ScenarioSpec& world, Rng& rng) {
  agent.target = Target{target.feature_id, target.feature_class, target.confidence, 0};
  while (true) {
    ApproachResult r = approach_step(agent, world, rng);
    switch (r.status) {
      case ApproachStatus::Acquired:
        return r.landmark;
      case ApproachStatus::Abandoned:
        return std::nullopt;
      case ApproachStatus::InProgress:
        apply_drift(agent, rng);
        break;
    }
  }
}

Pose random_walk_step(AgentState& agent, Vec2 incentive, const Rect& bounds, Rng& rng) {
  const double turn = rng.uniform(-agent.motion.max_turn, agent.motion.max_turn);
  double heading = agent.true_pose.heading + turn;
  const double strength = norm(incentive);
  if (strength > 0.0) {
    const double w = std::clamp(strength * agent.motion.incentive_weight, 0.0, 1.0);
    const Vec2 blended = unit_from_angle(heading) * (1.0 - w) + (incentive / strength) * w;
    if (norm(blended) > 1e-12) heading = std::atan2(blended.y, blended.x);
  }
  agent.true_pose.heading = wrap_angle(heading);
  advance(agent, agent.motion.speed * kStepSeconds, bounds);
  return agent.true_pose;
}

Pose apply_drift(AgentState& agent, Rng& rng) {
  const double sigma = agent.motion.sigma_drift;
  const double dx = rng.normal(0.0, sigma);
  const double dy = rng.normal(0.0, sigma);
  agent.drift_bias += Vec2{dx, dy};
  agent.believed_pose.position = agent.true_pose.position + agent.drift_bias;
  agent.believed_pose.heading = agent.true_pose.heading;
  return agent.believed_pose;
}

std::size_t oracle_correct(AgentState& agent, double threshold) {
  std::size_t snapped = 0;
  Vec2 residual_sum;
  std::size_t residual_count = 0;
  for (auto& l : agent.local_map.landmarks) {
    const Vec2 believed = local_to_collective(l.position, agent.start_pose);
    const Vec2 residual = believed - l.true_position;
    const double err = norm(residual);
    if (err > threshold) continue;
    ++snapped;
    if (err == 0.0) continue;
    l.position = collective_to_local(l.true_position, agent.start_pose);
    residual_sum += residual;
    ++residual_count;
  }
  if (residual_count > 0) {
    agent.drift_bias -= residual_sum / static_cast<double>(residual_count);
    agent.believed_pose.position = agent.true_pose.position + agent.drift_bias;
  }
  return snapped;
}

void log_observation(AgentState& agent, const Detection& detection) {
  for (auto& o : agent.observations.landmarks) {
    if (o.feature_id == detection.feature_id) {
      ++o.observation_count;
      o.confidence = std::max(o.confidence, detection.confidence);
      return;
    }
  }
  Landmark l;
  l.id = agent.next_landmark_id++;
  l.feature_class = detection.feature_class;
  l.confidence = detection.confidence;
  l.position = collective_to_local(believed_detection_position(agent, detection), agent.start_pose);
  l.true_position = detection.true_position;
  l.is_static = false;
  l.source_agent = agent.id;
  l.feature_id = detection.feature_id;
  l.frame = Frame::AgentLocal;
  agent.observations.landmarks.push_back(std::move(l));
}

Vec2 believed_detection_position(const AgentState& agent, const Detection& detection) {
  return believed_position_from(agent, detection.range, detection.bearing);
}

}  // namespace ctxslam
