#include <doctest.h>

#include <cmath>

#include "ctxslam/error.hpp"
#include "ctxslam/metrics.hpp"
#include "ctxslam/random.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ctxslam;

namespace {

LabelGrid rect_grid(const std::string& label, int r0, int c0, int r1, int c1) {
  LabelGrid g;
  for (int r = r0; r < r1; ++r)
    for (int c = c0; c < c1; ++c) g.set(r, c, label);
  return g;
}

Landmark lm(Vec2 believed, Vec2 truth, const std::string& cls = "tree") {
  Landmark l;
  l.feature_class = cls;
  l.position = believed;
  l.true_position = truth;
  l.frame = Frame::Collective;
  return l;
}

}  // namespace

TEST_CASE("area coverage") {
  const AreaCoverage none = area_coverage(0.0, 0.1, 100, 3, 1.0, 0.0);
  CHECK(none.searched_area == 0.0);
  CHECK(none.ratio == 0.0);
  const AreaCoverage capped = area_coverage(0.01, 0.1, 1e6, 3, 1.0, 1.0);
  CHECK(capped.searched_area == 1.0);
  CHECK(capped.ratio == 1.0);
}

TEST_CASE("straight sweep tracked ratio follows V W t / A") {
  const double w = 0.05, v = 0.01, t = 100.0;
  const Rect b{{0, 0}, {1, 1}};
  CoverageTracker tracker(b, w);
  CHECK(tracker.rows() == 20);
  Vec2 p{0.0, w / 2};
  for (int s = 0; s < t; ++s) {
    const Vec2 q = p + Vec2{v, 0.0};
    tracker.visit_segment(p, q);
    p = q;
  }
  const double expect = std::min(v * w * t / b.area(), 1.0);
  const AreaCoverage c = area_coverage(v, w, t, 1, b.area(), tracker.tracked_ratio());
  CHECK(c.ratio == doctest::Approx(expect));
  CHECK(std::abs(tracker.tracked_ratio() - expect) <= 0.1 * expect);
}

TEST_CASE("dispersion") {
  const Rect b{{0, 0}, {2, 1}};
  const std::vector<std::vector<Vec2>> same{{{0.3, 0.3}, {0.3, 0.3}, {0.3, 0.3}}};
  const Dispersion z = dispersion(same, b);
  CHECK(z.average == 0.0);
  CHECK(z.normalized == 0.0);

  const std::vector<std::vector<Vec2>> corners{{{0, 0}, {2, 1}}, {{0, 0}, {2, 1}}};
  CHECK(dispersion(corners, b).normalized == doctest::Approx(1.0));

  // Hand-logged trace: GCM (1, 0) then (0, 1).
  const std::vector<std::vector<Vec2>> trace{{{0, 0}, {2, 0}, {1, 0}}, {{0, 0}, {0, 3}, {0, 0}}};
  // Sample 1 distances: 1, 1, 0 -> 2/3. Sample 2: 1, 2, 1 -> 4/3.
  const Dispersion d = dispersion(trace, b);
  CHECK(std::abs(d.average - 1.0) < 1e-9);
  CHECK(std::abs(d.normalized - 1.0 / (std::sqrt(5.0) / 2.0)) < 1e-9);

  const std::vector<std::vector<Vec2>> empty;
  CHECK_THROWS_AS(dispersion(empty, b), InvalidArgument);
}

TEST_CASE("average centre offset error") {
  const std::vector<Landmark> perfect{lm({1, 1}, {1, 1}), lm({2, 0}, {2, 0})};
  CHECK(avg_center_offset_error(perfect) == 0.0);
  const std::vector<Landmark> off{lm({3, 4}, {0, 0})};
  CHECK(avg_center_offset_error(off) == doctest::Approx(5.0));
  CHECK(avg_center_offset_error(std::vector<Landmark>{}) == 0.0);

  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Landmark> ls;
    double sum = 0.0;
    const std::size_t n = 1 + rng.below(50);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 t{rng.uniform(), rng.uniform()};
      const Vec2 b = t + Vec2{rng.normal(0, 0.1), rng.normal(0, 0.1)};
      ls.push_back(lm(b, t));
      sum += std::sqrt((b.x - t.x) * (b.x - t.x) + (b.y - t.y) * (b.y - t.y));
    }
    const double er = avg_center_offset_error(ls);
    CHECK(std::abs(er - sum / static_cast<double>(n)) < 1e-12);
    // Translating belief and truth together changes nothing.
    for (auto& l : ls) {
      l.position += Vec2{5, -3};
      l.true_position += Vec2{5, -3};
    }
    CHECK(avg_center_offset_error(ls) == doctest::Approx(er).epsilon(1e-9));
  }
}

TEST_CASE("topology match") {
  const Ontology& o = test::test_ontology();
  std::vector<Feature> fs;
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 34; ++j)
      fs.push_back({static_cast<std::uint32_t>(i * 34 + j), "tree", {1.0 * i, 1.0 * j}, true});

  std::vector<Landmark> exact;
  for (const auto& f : fs) exact.push_back(lm(f.position, f.position));
  const TopologyMatch m = topology_match(exact, fs, o, 0.1);
  CHECK(m.coverage == 1.0);
  CHECK(m.position_error == 0.0);

  CHECK(topology_match(std::vector<Landmark>{}, fs, o, 0.1).coverage == 0.0);
  CHECK_THROWS_AS(topology_match(exact, fs, o, 0.0), InvalidArgument);

  std::vector<Landmark> wrong_class;
  for (const auto& f : fs) wrong_class.push_back(lm(f.position, f.position, "house"));
  CHECK(topology_match(wrong_class, fs, o, 0.1).matched == 0);

  constexpr double sigma = 0.01;
  Rng rng(10);
  std::vector<Landmark> noisy;
  for (const auto& f : fs)
    noisy.push_back(lm(f.position + Vec2{rng.normal(0, sigma), rng.normal(0, sigma)}, f.position));
  const TopologyMatch n = topology_match(noisy, fs, o, 0.1);
  CHECK(n.coverage == 1.0);
  CHECK(n.position_error == doctest::Approx(sigma * std::sqrt(std::numbers::pi / 2)).epsilon(0.1));
}

TEST_CASE("IoU identities") {
  const LabelGrid a = rect_grid("A", 0, 0, 12, 12);
  CHECK(iou(a, a, "A") == 1.0);
  CHECK(macro_iou(a, a) == 1.0);
  const LabelGrid b = rect_grid("A", 12, 12, 24, 24);
  CHECK(iou(a, b, "A") == 0.0);
  // Equal 12x12 rectangles overlapping by half: 72 / 216.
  const LabelGrid c = rect_grid("A", 0, 6, 12, 18);
  CHECK(iou(a, c, "A") == 1.0 / 3.0);
  CHECK(iou(c, a, "A") == iou(a, c, "A"));
  CHECK(iou(a, a, "Z") == 1.0);
  CHECK_THROWS_AS(iou(a, LabelGrid(12, 12), "A"), InvalidArgument);

  LabelGrid two = rect_grid("A", 0, 0, 24, 12);
  for (int r = 0; r < 24; ++r)
    for (int col = 12; col < 24; ++col) two.set(r, col, "B");
  const auto per = iou_per_label(two, two);
  CHECK(per.size() == 2);
  CHECK(per.at("A") == 1.0);
}

TEST_CASE("AP identities") {
  LabelGrid truth = rect_grid("A", 0, 0, 24, 12);
  for (int r = 0; r < 24; ++r)
    for (int c = 12; c < 24; ++c) truth.set(r, c, "B");
  const ApSummary perfect = precision_recall_ap(truth, truth);
  REQUIRE(perfect.per_class.size() == 2);
  for (const auto& c : perfect.per_class) CHECK(c.ap == 1.0);
  CHECK(perfect.mean_ap == 1.0);
  CHECK(perfect.micro_ap == 1.0);

  LabelGrid swapped;
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 24; ++c) swapped.set(r, c, truth.label(r, c) == "A" ? "B" : "A");
  const ApSummary wrong = precision_recall_ap(swapped, truth);
  for (const auto& c : wrong.per_class) CHECK(c.ap == 0.0);
  CHECK(wrong.mean_ap == 0.0);

  const ApSummary blank = precision_recall_ap(LabelGrid{}, truth);
  CHECK(blank.mean_ap == 0.0);
}

TEST_CASE("six-cell AP hand example") {
  LabelGrid truth(1, 6);
  LabelGrid pred(1, 6);
  const char* t[] = {"A", "A", "A", "B", "B", "B"};
  for (int c = 0; c < 6; ++c) truth.set(0, c, t[c]);
  pred.set(0, 0, "A", 0.9);
  pred.set(0, 3, "A", 0.8);
  pred.set(0, 1, "A", 0.7);
  pred.set(0, 4, "B", 0.6);
  pred.set(0, 5, "A", 0.5);
  const ApSummary s = precision_recall_ap(pred, truth);
  REQUIRE(s.per_class.size() == 2);
  // A: (0,1) (1/3,1) (1/3,1/2) (2/3,2/3) (2/3,1/2) -> 1/3 + 7/36.
  CHECK(std::abs(s.per_class[0].ap - 19.0 / 36.0) < 1e-9);
  CHECK(std::abs(s.per_class[1].ap - 1.0 / 3.0) < 1e-9);
  CHECK(std::abs(s.mean_ap - 31.0 / 72.0) < 1e-9);

  const double ref_a = oracle::average_precision({{0.9, true}, {0.8, false}, {0.7, true}, {0.5, false}}, 3);
  CHECK(std::abs(s.per_class[0].ap - ref_a) < 1e-12);
  const double ref_micro = oracle::average_precision(
      {{0.9, true}, {0.8, false}, {0.7, true}, {0.6, true}, {0.5, false}}, 6);
  CHECK(std::abs(s.micro_ap - ref_micro) < 1e-12);
}

TEST_CASE("AP matches the table oracle and ignores monotone rescaling") {
  Rng rng(77);
  const std::vector<std::string> labels{"A", "B", "C"};
  for (int trial = 0; trial < 50; ++trial) {
    LabelGrid truth, pred, rescaled;
    for (int r = 0; r < 24; ++r)
      for (int c = 0; c < 24; ++c) {
        truth.set(r, c, labels[rng.below(3)]);
        if (rng.bernoulli(0.2)) continue;
        // Coarse confidences make ties common.
        const double conf = 0.1 * static_cast<double>(1 + rng.below(10));
        const std::string& l = labels[rng.below(3)];
        pred.set(r, c, l, conf);
        rescaled.set(r, c, l, std::exp(3.0 * conf) - 1.0);
      }
    const ApSummary s = precision_recall_ap(pred, truth);
    const ApSummary m = precision_recall_ap(rescaled, truth);
    for (std::size_t k = 0; k < s.per_class.size(); ++k) {
      const auto& cls = s.per_class[k];
      std::vector<oracle::Ranked> items;
      for (int r = 0; r < 24; ++r)
        for (int c = 0; c < 24; ++c)
          if (pred.label(r, c) == cls.label)
            items.push_back({pred.confidence(r, c), truth.label(r, c) == cls.label});
      CHECK(std::abs(cls.ap - oracle::average_precision(items, static_cast<long>(cls.positives))) < 1e-12);
      CHECK(std::abs(cls.ap - m.per_class[k].ap) < 1e-12);
    }
  }
}

TEST_CASE("explored accuracy") {
  const LabelGrid truth = rect_grid("A", 0, 0, 24, 24);
  LabelGrid pred = rect_grid("A", 0, 0, 24, 12);
  std::vector<bool> all(576, true);
  CHECK(explored_accuracy(pred, truth, all) == doctest::Approx(0.5));
  std::vector<bool> left(576, false);
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 12; ++c) left[r * 24 + c] = true;
  CHECK(explored_accuracy(pred, truth, left) == 1.0);
  CHECK(explored_accuracy(pred, truth, std::vector<bool>(576, false)) == 0.0);
}

TEST_CASE("report CSV columns line up") {
  TrialReport r;
  r.scenario = "quadrant";
  const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(count(report_csv_header()) == count(report_csv_row(r)));
  CHECK(report_to_json(r).find("\"grid\"") != std::string::npos);
}
