#pragma once

#include <span>
#include <string>
#include <vector>

#include "ctxslam/geometry.hpp"
#include "ctxslam/landmark.hpp"
#include "ctxslam/ontology.hpp"

namespace ctxslam {

struct SegmentLandmark {
  std::size_t class_index = 0;  // into Ontology::feature_classes()
  double confidence = 0.0;
  Vec2 position;
};

// Landmarks of one segment plus the segment's largest possible internal
// distance, used to normalise pairwise distances into [0, 1].
struct SegmentFeatures {
  std::vector<SegmentLandmark> landmarks;
  double max_distance = 0.0;

  std::size_t size() const { return landmarks.size(); }

  // Rectangle segment: normalised by the rectangle diagonal.
  static SegmentFeatures for_rect(std::vector<SegmentLandmark> landmarks, const Rect& rect);
  // Point-set segment: normalised by the diameter of its convex hull.
  static SegmentFeatures for_points(std::vector<SegmentLandmark> landmarks);
};

std::vector<SegmentLandmark> to_segment_landmarks(const Ontology& ontology,
                                                  std::span<const Landmark> landmarks);

struct SemanticsParams {
  double alpha = 0.5;  // blend between confidence and inference ratio, in (0, 1)
  // Sum over ordered pairs x != y (maximum inferences z(z-1)) instead of
  // unordered pairs (z(z-1)/2). The normalised outputs are identical.
  bool ordered_pairs = false;
};

struct EnvironmentDistribution {
  std::vector<std::string> environments;  // ontology order
  std::vector<double> probability;
  std::vector<double> confidence;
  std::vector<std::size_t> inferences;
  std::string label = std::string(kUnknown);
  double max_probability = 0.0;
  double alpha = 0.5;

  double probability_of(std::string_view environment) const;
};

// Euclidean distance over the segment's max distance, clamped to [0, 1].
// Throws InvalidArgument when i == j or an index is out of range.
double normalized_pairwise_distance(const SegmentFeatures& seg, std::size_t i, std::size_t j);

struct EnvironmentConfidence {
  double confidence = 0.0;
  std::size_t inferences = 0;
};

// Sums (SP_x f_x + SP_y f_y)(1 - d_xy) over the pairs whose classes both
// relate to the environment (the inferences), normalised by twice the
// inference count. Without inferences the confidence is the mean SP f over
// the segment's features, which for one feature is that feature's SP f.
EnvironmentConfidence environment_confidence(const SegmentFeatures& seg, const Ontology& ontology,
                                             std::size_t environment_index,
                                             bool ordered_pairs = false);

// P(e) = alpha C(e) + (1 - alpha) inferences(e) / max_inferences, for every
// ontology environment. The label is the arg max with ties broken by name;
// a segment whose best probability is 0 is Unknown.
// Throws InvalidArgument for alpha outside (0, 1).
EnvironmentDistribution environment_distribution(const SegmentFeatures& seg,
                                                 const Ontology& ontology,
                                                 const SemanticsParams& params);

struct Classification {
  std::string label = std::string(kUnknown);
  double confidence = 0.0;
  bool passed = false;
};

// Pass iff the best probability reaches the threshold (inclusive).
Classification classify_distribution(const EnvironmentDistribution& dist, double threshold);
Classification classify_segment(const SegmentFeatures& seg, const Ontology& ontology,
                                const SemanticsParams& params, double threshold);

}  // namespace ctxslam
