#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctxslam/geometry.hpp"

namespace ctxslam {

enum class Frame { AgentLocal, Collective };

// Semantically labelled static feature as held in a map. `position` is the
// believed position expressed in the owning map's frame; `true_position` is
// the world position, carried for evaluation only.
struct Landmark {
  std::uint32_t id = 0;
  std::string feature_class;
  double confidence = 0.0;
  Vec2 position;
  Vec2 true_position;
  bool is_static = true;
  int source_agent = -1;
  int observation_count = 1;
  std::uint32_t feature_id = 0;  // simulator feature this was acquired from
  Frame frame = Frame::AgentLocal;
};

struct LandmarkMap {
  Frame frame = Frame::AgentLocal;
  int owner = -1;  // agent id, -1 for the collective map
  std::vector<Landmark> landmarks;
};

// Transform between an agent-local frame (origin at the start pose, x along
// the start heading) and the collective frame.
inline Vec2 local_to_collective(Vec2 p, const Pose& start) {
  return rotate(p, start.heading) + start.position;
}
inline Vec2 collective_to_local(Vec2 p, const Pose& start) {
  return rotate(p - start.position, -start.heading);
}

std::vector<Vec2> positions_of(std::span<const Landmark> landmarks);

}  // namespace ctxslam
