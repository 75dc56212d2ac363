#include <doctest.h>

#include <algorithm>

#include "ctxslam/error.hpp"
#include "ctxslam/semantics.hpp"
#include "random_cases.hpp"
#include "test_support.hpp"

using namespace ctxslam;

namespace {

// Single environment "E" with exclusive classes a (SP 1) and b (SP 0.5).
const Ontology& one_env() {
  static const Ontology o({"E", "F"}, {FeatureClass{"a", true, {{"E", 1.0}}, {}},
                                       FeatureClass{"b", true, {{"E", 0.5}}, {}},
                                       FeatureClass{"f", true, {{"F", 1.0}}, {}}});
  return o;
}

SegmentLandmark sl(std::size_t cls, double conf, Vec2 p) { return {cls, conf, p}; }

}  // namespace

TEST_CASE("normalised pairwise distance") {
  const Rect unit{{0, 0}, {1, 1}};
  auto seg = SegmentFeatures::for_rect({sl(0, 1, {0, 0}), sl(0, 1, {0, 0}), sl(0, 1, {1, 1}), sl(0, 1, {1, 0})},
                                       unit);
  CHECK(normalized_pairwise_distance(seg, 0, 1) == 0.0);
  CHECK(normalized_pairwise_distance(seg, 0, 2) == doctest::Approx(1.0));
  CHECK(normalized_pairwise_distance(seg, 0, 3) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(normalized_pairwise_distance(seg, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(normalized_pairwise_distance(seg, 0, 9), InvalidArgument);

  auto pts = SegmentFeatures::for_points({sl(0, 1, {0, 0}), sl(0, 1, {3, 4}), sl(0, 1, {1, 1})});
  CHECK(pts.max_distance == doctest::Approx(5.0));
}

TEST_CASE("environment confidence hand cases") {
  const Ontology& o = one_env();
  const Rect unit{{0, 0}, {1, 1}};
  const auto empty = SegmentFeatures::for_rect({}, unit);
  CHECK(environment_confidence(empty, o, 0).confidence == 0.0);
  CHECK(environment_confidence(empty, o, 0).inferences == 0);

  const auto two = SegmentFeatures::for_rect({sl(0, 1, {0.5, 0.5}), sl(0, 1, {0.5, 0.5})}, unit);
  const auto c = environment_confidence(two, o, 0);
  CHECK(c.inferences == 1);
  CHECK(c.confidence == 1.0);  // C_raw = 2 over 2 x 1 inference
  CHECK(environment_confidence(two, o, 1).inferences == 0);
  CHECK(environment_confidence(two, o, 1).confidence == 0.0);

  const auto single = SegmentFeatures::for_rect({sl(1, 0.8, {0.2, 0.2})}, unit);
  CHECK(environment_confidence(single, o, 0).confidence == doctest::Approx(0.4));
}

TEST_CASE("two coincident exclusive features give P = 1 exactly") {
  const Ontology& o = one_env();
  const auto seg = SegmentFeatures::for_rect({sl(0, 1, {0.3, 0.3}), sl(0, 1, {0.3, 0.3})},
                                             Rect{{0, 0}, {1, 1}});
  const auto d = environment_distribution(seg, o, {0.5, false});
  CHECK(d.probability_of("E") == 1.0);
  CHECK(d.probability_of("F") == 0.0);
  CHECK(d.label == "E");
}

TEST_CASE("empty segment is Unknown") {
  const auto seg = SegmentFeatures::for_rect({}, Rect{{0, 0}, {1, 1}});
  const auto d = environment_distribution(seg, one_env(), {});
  CHECK(d.label == kUnknown);
  for (double p : d.probability) CHECK(p == 0.0);
  const auto c = classify_segment(seg, one_env(), {}, 0.5);
  CHECK(c.label == kUnknown);
  CHECK(c.confidence == 0.0);
  CHECK_FALSE(c.passed);
}

TEST_CASE("classification threshold") {
  EnvironmentDistribution d;
  d.environments = {"A", "B"};
  d.probability = {0.7, 0.2};
  auto c = classify_distribution(d, 0.5);
  CHECK(c.label == "A");
  CHECK(c.confidence == 0.7);
  CHECK(c.passed);
  CHECK(classify_distribution(d, 0.7).passed);
  CHECK_FALSE(classify_distribution(d, 0.71).passed);
  d.probability = {0.4, 0.4};
  CHECK(classify_distribution(d, 0.1).label == "A");
  CHECK_THROWS_AS(classify_distribution(d, 1.5), InvalidArgument);
}

TEST_CASE("alpha must lie strictly inside (0, 1)") {
  const auto seg = SegmentFeatures::for_rect({}, Rect{{0, 0}, {1, 1}});
  CHECK_THROWS_AS(environment_distribution(seg, one_env(), {0.0, false}), InvalidArgument);
  CHECK_THROWS_AS(environment_distribution(seg, one_env(), {1.0, false}), InvalidArgument);
}

TEST_CASE("random segments match the double-loop oracle") {
  Rng rng(123);
  for (int i = 0; i < 300; ++i) {
    const auto rs = test::random_segment(rng);
    const double alpha = rng.uniform(0.05, 0.95);
    const auto d = environment_distribution(rs.seg, rs.ontology, {alpha, false});
    const auto ref = oracle::semantics(rs.oracle_features, rs.sp, rs.ontology.environments(),
                                       rs.seg.max_distance, alpha);
    for (std::size_t e = 0; e < d.environments.size(); ++e) {
      CHECK(std::abs(d.confidence[e] - ref.c[e]) < 1e-9);
      CHECK(std::abs(d.probability[e] - ref.p[e]) < 1e-9);
      CHECK(static_cast<long>(d.inferences[e]) == ref.inferences[e]);
    }
    CHECK(d.label == (ref.label < 0 ? std::string(kUnknown) : d.environments[ref.label]));
  }
}

TEST_CASE("ordered and unordered pair sums agree") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto rs = test::random_segment(rng);
    const auto a = environment_distribution(rs.seg, rs.ontology, {0.5, false});
    const auto b = environment_distribution(rs.seg, rs.ontology, {0.5, true});
    for (std::size_t e = 0; e < a.probability.size(); ++e) {
      CHECK(a.probability[e] == doctest::Approx(b.probability[e]).epsilon(1e-12));
      CHECK(b.inferences[e] == 2 * a.inferences[e]);
    }
  }
}

TEST_CASE("distribution invariants") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    auto rs = test::random_segment(rng);
    const auto d = environment_distribution(rs.seg, rs.ontology, {0.5, false});
    for (double p : d.probability) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
    for (std::size_t x = 0; x < rs.seg.size(); ++x)
      for (std::size_t y = x + 1; y < rs.seg.size(); ++y) {
        const double nd = normalized_pairwise_distance(rs.seg, x, y);
        CHECK(nd >= 0.0);
        CHECK(nd <= 1.0);
      }
    if (d.label != kUnknown)
      CHECK(d.max_probability == *std::max_element(d.probability.begin(), d.probability.end()));

    // Feature order does not matter.
    auto shuffled = rs.seg;
    std::reverse(shuffled.landmarks.begin(), shuffled.landmarks.end());
    const auto s = environment_distribution(shuffled, rs.ontology, {0.5, false});
    CHECK(s.label == d.label);
    for (std::size_t e = 0; e < d.probability.size(); ++e)
      CHECK(s.probability[e] == doctest::Approx(d.probability[e]).epsilon(1e-12));

    // Uniform scaling of positions and segment size leaves P unchanged.
    auto scaled = rs.seg;
    for (auto& l : scaled.landmarks) l.position = l.position * 3.0;
    scaled.max_distance *= 3.0;
    const auto sc = environment_distribution(scaled, rs.ontology, {0.5, false});
    for (std::size_t e = 0; e < d.probability.size(); ++e)
      CHECK(sc.probability[e] == doctest::Approx(d.probability[e]).epsilon(1e-9));
  }
}

TEST_CASE("relabelling environments permutes the distribution") {
  const Ontology a({"E", "F"}, {FeatureClass{"x", true, {{"E", 0.9}, {"F", 0.3}}, {}},
                                FeatureClass{"y", true, {{"F", 0.6}}, {}}});
  const Ontology b({"F", "E"}, {FeatureClass{"x", true, {{"E", 0.9}, {"F", 0.3}}, {}},
                                FeatureClass{"y", true, {{"F", 0.6}}, {}}});
  const std::vector<SegmentLandmark> ls{sl(0, 0.8, {0.1, 0.1}), sl(1, 0.9, {0.2, 0.4}),
                                        sl(0, 0.5, {0.7, 0.2})};
  const auto seg = SegmentFeatures::for_rect(ls, Rect{{0, 0}, {1, 1}});
  const auto da = environment_distribution(seg, a, {});
  const auto db = environment_distribution(seg, b, {});
  CHECK(da.label == db.label);
  CHECK(da.probability_of("E") == doctest::Approx(db.probability_of("E")));
  CHECK(da.probability_of("F") == doctest::Approx(db.probability_of("F")));
}

TEST_CASE("adding an exclusive feature of e never lowers P(e) when features coincide") {
  const Ontology& o = one_env();
  std::vector<SegmentLandmark> ls{sl(0, 1.0, {0.5, 0.5})};
  double last = 0.0;
  for (int i = 0; i < 6; ++i) {
    const auto d = environment_distribution(SegmentFeatures::for_rect(ls, Rect{{0, 0}, {1, 1}}), o, {});
    CHECK(d.probability_of("E") >= last);
    last = d.probability_of("E");
    ls.push_back(sl(0, 1.0, {0.5, 0.5}));
  }
}
