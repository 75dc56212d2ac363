#include "ctxslam/semantics.hpp"

#include <algorithm>

#include "ctxslam/error.hpp"

namespace ctxslam {

SegmentFeatures SegmentFeatures::for_rect(std::vector<SegmentLandmark> landmarks, const Rect& rect) {
  return SegmentFeatures{std::move(landmarks), rect.diagonal()};
}

SegmentFeatures SegmentFeatures::for_points(std::vector<SegmentLandmark> landmarks) {
  std::vector<Vec2> pts;
  pts.reserve(landmarks.size());
  for (const auto& l : landmarks) pts.push_back(l.position);
  const Polygon hull = convex_hull(pts);
  return SegmentFeatures{std::move(landmarks), diameter(hull)};
}

std::vector<SegmentLandmark> to_segment_landmarks(const Ontology& ontology,
                                                  std::span<const Landmark> landmarks) {
  std::vector<SegmentLandmark> out;
  out.reserve(landmarks.size());
  for (const auto& l : landmarks)
    out.push_back({ontology.class_index(l.feature_class), l.confidence, l.position});
  return out;
}

double EnvironmentDistribution::probability_of(std::string_view environment) const {
  for (std::size_t i = 0; i < environments.size(); ++i)
    if (environments[i] == environment) return probability[i];
  return 0.0;
}

namespace {

double pair_distance(const SegmentFeatures& seg, std::size_t i, std::size_t j) {
  if (seg.max_distance <= 0.0) return 0.0;
  const double d = distance(seg.landmarks[i].position, seg.landmarks[j].position) / seg.max_distance;
  return std::clamp(d, 0.0, 1.0);
}

struct Accumulator {
  double raw = 0.0;
  std::size_t inferences = 0;
  double single_sum = 0.0;  // sum of SP f over features
};

// One pass over the pairs for every environment at once.
std::vector<Accumulator> accumulate(const SegmentFeatures& seg, const Ontology& ontology,
                                    bool ordered_pairs) {
  const std::size_t n_env = ontology.environments().size();
  const std::size_t z = seg.size();
  std::vector<Accumulator> acc(n_env);
  std::vector<double> support(z * n_env);
  for (std::size_t i = 0; i < z; ++i) {
    const auto& l = seg.landmarks[i];
    for (std::size_t e = 0; e < n_env; ++e) {
      const double sp = ontology.proximity(l.class_index, e);
      support[i * n_env + e] = sp > 0.0 ? sp * l.confidence : -1.0;
      if (sp > 0.0) acc[e].single_sum += sp * l.confidence;
    }
  }
  for (std::size_t i = 0; i < z; ++i) {
    for (std::size_t j = ordered_pairs ? 0 : i + 1; j < z; ++j) {
      if (i == j) continue;
      const double closeness = 1.0 - pair_distance(seg, i, j);
      for (std::size_t e = 0; e < n_env; ++e) {
        const double si = support[i * n_env + e];
        const double sj = support[j * n_env + e];
        if (si < 0.0 || sj < 0.0) continue;
        acc[e].raw += (si + sj) * closeness;
        ++acc[e].inferences;
      }
    }
  }
  return acc;
}

double normalised_confidence(const Accumulator& a, std::size_t z) {
  if (z == 0) return 0.0;
  if (a.inferences == 0) return a.single_sum / static_cast<double>(z);
  return a.raw / (2.0 * static_cast<double>(a.inferences));
}

// Arg max of the probabilities, ties to the smaller name; size() when all are 0.
std::size_t best_environment(const EnvironmentDistribution& dist) {
  const std::size_t n = dist.probability.size();
  std::size_t best = n;
  for (std::size_t e = 0; e < n; ++e) {
    if (dist.probability[e] <= 0.0) continue;
    if (best == n || dist.probability[e] > dist.probability[best] ||
        (dist.probability[e] == dist.probability[best] &&
         dist.environments[e] < dist.environments[best]))
      best = e;
  }
  return best;
}

}  // namespace

double normalized_pairwise_distance(const SegmentFeatures& seg, std::size_t i, std::size_t j) {
  if (i == j) throw InvalidArgument("pairwise distance needs two distinct landmarks");
  if (i >= seg.size() || j >= seg.size()) throw InvalidArgument("landmark index out of range");
  return pair_distance(seg, i, j);
}

EnvironmentConfidence environment_confidence(const SegmentFeatures& seg, const Ontology& ontology,
                                             std::size_t environment_index, bool ordered_pairs) {
  if (environment_index >= ontology.environments().size())
    throw InvalidArgument("environment index out of range");
  const auto acc = accumulate(seg, ontology, ordered_pairs);
  const Accumulator& a = acc[environment_index];
  return {normalised_confidence(a, seg.size()), a.inferences};
}

EnvironmentDistribution environment_distribution(const SegmentFeatures& seg,
                                                 const Ontology& ontology,
                                                 const SemanticsParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0))
    throw InvalidArgument("alpha must lie in (0, 1)");
  EnvironmentDistribution dist;
  dist.alpha = params.alpha;
  dist.environments = ontology.environments();
  const std::size_t n_env = dist.environments.size();
  dist.probability.assign(n_env, 0.0);
  dist.confidence.assign(n_env, 0.0);
  dist.inferences.assign(n_env, 0);

  const std::size_t z = seg.size();
  if (z == 0) return dist;

  const auto acc = accumulate(seg, ontology, params.ordered_pairs);
  const double max_inferences = params.ordered_pairs
                                    ? static_cast<double>(z) * static_cast<double>(z - 1)
                                    : static_cast<double>(z) * static_cast<double>(z - 1) / 2.0;
  for (std::size_t e = 0; e < n_env; ++e) {
    const double c = normalised_confidence(acc[e], z);
    const double ratio = z < 2 ? 0.0 : static_cast<double>(acc[e].inferences) / max_inferences;
    dist.confidence[e] = c;
    dist.inferences[e] = acc[e].inferences;
    dist.probability[e] = std::clamp(params.alpha * c + (1.0 - params.alpha) * ratio, 0.0, 1.0);
  }

  const std::size_t best = best_environment(dist);
  if (best != n_env) {
    dist.label = dist.environments[best];
    dist.max_probability = dist.probability[best];
  }
  return dist;
}

Classification classify_distribution(const EnvironmentDistribution& dist, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) throw InvalidArgument("threshold must lie in [0, 1]");
  if (dist.environments.size() != dist.probability.size())
    throw InvalidArgument("distribution has mismatched environment and probability lists");
  const std::size_t best = best_environment(dist);
  if (best == dist.probability.size()) return {std::string(kUnknown), 0.0, threshold <= 0.0};
  const double p = dist.probability[best];
  return {dist.environments[best], p, p >= threshold};
}

Classification classify_segment(const SegmentFeatures& seg, const Ontology& ontology,
                                const SemanticsParams& params, double threshold) {
  return classify_distribution(environment_distribution(seg, ontology, params), threshold);
}

}  // namespace ctxslam
