#include "ctxslam/control_agent.hpp"

#include <algorithm>
#include <limits>

#include "ctxslam/error.hpp"

namespace ctxslam {

void MergeConfig::validate() const {
  if (!(merge_radius > 0.0) || !(proximity_tolerance > 0.0))
    throw InvalidArgument("merge distances must be positive");
  if (resurrection_threshold < 2) throw InvalidArgument("resurrection threshold must be >= 2");
  if (confidence_floor < 0.0 || confidence_floor > 1.0)
    throw InvalidArgument("confidence floor must lie in [0, 1]");
}

const char* to_string(MergeOutcome outcome) {
  switch (outcome) {
    case MergeOutcome::Merged: return "merged";
    case MergeOutcome::Added: return "added";
    case MergeOutcome::Discarded: return "discarded";
    case MergeOutcome::Resurrected: return "resurrected";
  }
  return "?";
}

CollectiveMap::CollectiveMap(const Ontology& ontology, MergeConfig config)
    : ontology_(&ontology), config_(config) {
  config_.validate();
}

bool CollectiveMap::similar(const std::string& a, const std::string& b) const {
  return a == b || ontology_->semantically_similar(a, b);
}

Landmark CollectiveMap::combine(const Landmark& existing, const Landmark& incoming) {
  Landmark out = incoming.confidence > existing.confidence ? incoming : existing;
  out.id = existing.id;
  out.position = (existing.position + incoming.position) * 0.5;
  out.observation_count = existing.observation_count + incoming.observation_count;
  out.frame = Frame::Collective;
  return out;
}

std::ptrdiff_t CollectiveMap::nearest_similar(Vec2 p, const std::string& feature_class,
                                              std::ptrdiff_t skip) const {
  std::ptrdiff_t best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < landmarks_.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == skip) continue;
    const double d = distance(p, landmarks_[i].position);
    if (d > config_.merge_radius || d >= best_d) continue;
    if (!similar(feature_class, landmarks_[i].feature_class)) continue;
    best = static_cast<std::ptrdiff_t>(i);
    best_d = d;
  }
  return best;
}

void CollectiveMap::settle(std::size_t idx) {
  while (true) {
    const Landmark& cur = landmarks_[idx];
    const std::ptrdiff_t j = nearest_similar(cur.position, cur.feature_class,
                                             static_cast<std::ptrdiff_t>(idx));
    if (j < 0) return;
    const std::size_t keep = std::min(idx, static_cast<std::size_t>(j));
    const std::size_t drop = std::max(idx, static_cast<std::size_t>(j));
    landmarks_[keep] = combine(landmarks_[keep], landmarks_[drop]);
    landmarks_.erase(landmarks_.begin() + static_cast<std::ptrdiff_t>(drop));
    idx = keep;
  }
}

MergeOutcome CollectiveMap::merge_landmark(const Landmark& incoming_in, double time) {
  if (incoming_in.frame != Frame::Collective)
    throw InvalidArgument("landmark is not in the collective frame");
  Landmark incoming = incoming_in;

  double min_sep = std::numeric_limits<double>::infinity();
  for (const auto& l : landmarks_) min_sep = std::min(min_sep, distance(l.position, incoming.position));
  const bool has_neighbours = min_sep <= config_.merge_radius;

  if (!has_neighbours) {
    incoming.id = next_id_++;
    landmarks_.push_back(std::move(incoming));
    return MergeOutcome::Added;
  }

  if (const auto j = nearest_similar(incoming.position, incoming.feature_class); j >= 0) {
    const auto idx = static_cast<std::size_t>(j);
    landmarks_[idx] = combine(landmarks_[idx], incoming);
    settle(idx);
    return MergeOutcome::Merged;
  }

  if (incoming.confidence >= config_.confidence_floor && min_sep >= config_.proximity_tolerance) {
    incoming.id = next_id_++;
    landmarks_.push_back(std::move(incoming));
    return MergeOutcome::Added;
  }

  // Discard, then check whether enough similar discards have gathered here.
  std::vector<std::size_t> group;
  for (std::size_t i = 0; i < discards_.size(); ++i) {
    const Landmark& d = discards_[i].landmark;
    if (similar(d.feature_class, incoming.feature_class) &&
        distance(d.position, incoming.position) <= config_.proximity_tolerance)
      group.push_back(i);
  }
  if (static_cast<int>(group.size()) < config_.resurrection_threshold) {
    discards_.push_back({std::move(incoming), time});
    return MergeOutcome::Discarded;
  }

  Landmark revived = incoming;
  Vec2 sum = incoming.position;
  int observations = incoming.observation_count;
  for (const std::size_t i : group) {
    const Landmark& d = discards_[i].landmark;
    sum += d.position;
    observations += d.observation_count;
    if (d.confidence > revived.confidence) revived = d;
  }
  revived.position = sum / static_cast<double>(group.size() + 1);
  revived.observation_count = observations;
  revived.frame = Frame::Collective;
  for (auto it = group.rbegin(); it != group.rend(); ++it)
    discards_.erase(discards_.begin() + static_cast<std::ptrdiff_t>(*it));

  // Update the nearest similar landmark in range, if any; otherwise insert.
  const std::ptrdiff_t at = nearest_similar(revived.position, revived.feature_class);
  std::size_t idx;
  if (at >= 0) {
    idx = static_cast<std::size_t>(at);
    revived.id = landmarks_[idx].id;
    landmarks_[idx] = std::move(revived);
  } else {
    revived.id = next_id_++;
    landmarks_.push_back(std::move(revived));
    idx = landmarks_.size() - 1;
  }
  settle(idx);
  return MergeOutcome::Resurrected;
}

std::vector<MergeOutcome> CollectiveMap::merge_map(const LandmarkMap& edge_map, double time) {
  if (edge_map.frame != Frame::Collective)
    throw InvalidArgument("map must be rebased into the collective frame before merging");
  std::vector<MergeOutcome> outcomes;
  outcomes.reserve(edge_map.landmarks.size());
  for (const auto& l : edge_map.landmarks) outcomes.push_back(merge_landmark(l, time));
  return outcomes;
}

LandmarkMap CollectiveMap::snapshot() const {
  return LandmarkMap{Frame::Collective, -1, landmarks_};
}

LandmarkMap rebase_map(const LandmarkMap& edge_map, const Pose& start_pose) {
  LandmarkMap out = edge_map;
  out.frame = Frame::Collective;
  for (auto& l : out.landmarks) {
    l.position = local_to_collective(l.position, start_pose);
    l.frame = Frame::Collective;
  }
  return out;
}

std::vector<Vec2> dispersion_incentives(std::span<const Vec2> positions, const Rect& bounds,
                                        const IncentiveParams& params) {
  std::vector<Vec2> out(positions.size());
  if (positions.size() < 2) return out;
  Vec2 gcm;
  for (const Vec2 p : positions) gcm += p;
  gcm = gcm / static_cast<double>(positions.size());
  const double cap = params.distance_cap > 0.0 ? params.distance_cap
                                                : 0.25 * std::min(bounds.width(), bounds.height());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec2 away = positions[i] - gcm;
    const double d = norm(away);
    if (d < 1e-12 || d > cap) continue;
    out[i] = away / d * params.gain;
  }
  return out;
}

ControlAgent::ControlAgent(const Ontology& ontology, MergeConfig config)
    : collective_(ontology, config), observations_(ontology, config) {}

void ControlAgent::register_agent(int agent_id, const Pose& start) {
  starts_[agent_id] = start;
  static_cursor_[agent_id] = 0;
  observation_cursor_[agent_id] = 0;
}

LandmarkMap ControlAgent::rebase(const LandmarkMap& edge_map) const {
  const auto it = starts_.find(edge_map.owner);
  if (it == starts_.end())
    throw InvalidArgument("unknown agent id " + std::to_string(edge_map.owner));
  return rebase_map(edge_map, it->second);
}

void ControlAgent::receive(const LandmarkMap& static_snapshot,
                           const LandmarkMap& observation_snapshot, double time) {
  auto merge_new = [&](const LandmarkMap& snap, std::map<int, std::size_t>& cursors,
                       CollectiveMap& target) {
    const LandmarkMap rebased = rebase(snap);
    std::size_t& cursor = cursors[snap.owner];
    for (std::size_t i = cursor; i < rebased.landmarks.size(); ++i)
      target.merge_landmark(rebased.landmarks[i], time);
    cursor = std::max(cursor, rebased.landmarks.size());
  };
  merge_new(static_snapshot, static_cursor_, collective_);
  merge_new(observation_snapshot, observation_cursor_, observations_);
}

}  // namespace ctxslam
