#include "ctxslam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <tuple>

#include "ctxslam/error.hpp"
#include "ctxslam/io.hpp"

namespace ctxslam {

CoverageTracker::CoverageTracker(const Rect& bounds, double cell_side) : bounds_(bounds) {
  if (!(cell_side > 0.0)) throw InvalidArgument("coverage cell side must be positive");
  cols_ = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell_side - 1e-9)));
  rows_ = std::max(1, static_cast<int>(std::ceil(bounds.height() / cell_side - 1e-9)));
  cell_w_ = bounds.width() / cols_;
  cell_h_ = bounds.height() / rows_;
  cells_.assign(static_cast<std::size_t>(rows_) * cols_, false);
}

void CoverageTracker::visit(Vec2 p) {
  const auto [r, c] = LabelGrid::cell_of(bounds_, rows_, cols_, p);
  const std::size_t i = static_cast<std::size_t>(r) * cols_ + c;
  if (!cells_[i]) {
    cells_[i] = true;
    ++visited_;
  }
}

void CoverageTracker::visit_segment(Vec2 a, Vec2 b) {
  const double step = std::min(cell_w_, cell_h_) / 4.0;
  const int n = static_cast<int>(std::ceil(distance(a, b) / step));
  for (int i = 0; i <= n; ++i) visit(n == 0 ? a : a + (b - a) * (static_cast<double>(i) / n));
}

double CoverageTracker::tracked_ratio() const {
  return static_cast<double>(visited_) / static_cast<double>(cells_.size());
}

AreaCoverage area_coverage(double speed, double sweep_width, double elapsed_seconds,
                           int agent_count, double total_area, double tracked_ratio) {
  AreaCoverage out;
  out.total_area = total_area;
  out.searched_area =
      std::min(total_area, speed * sweep_width * elapsed_seconds * static_cast<double>(agent_count));
  out.ratio = total_area > 0.0 ? out.searched_area / total_area : 0.0;
  out.tracked_ratio = tracked_ratio;
  return out;
}

double dispersion_sample(std::span<const Vec2> positions) {
  if (positions.empty()) return 0.0;
  Vec2 gcm;
  for (const Vec2 p : positions) gcm += p;
  gcm = gcm / static_cast<double>(positions.size());
  double sum = 0.0;
  for (const Vec2 p : positions) sum += distance(p, gcm);
  return sum / static_cast<double>(positions.size());
}

Dispersion dispersion(std::span<const std::vector<Vec2>> samples, const Rect& bounds) {
  if (samples.empty()) throw InvalidArgument("dispersion needs at least one sample");
  double sum = 0.0;
  for (const auto& s : samples) sum += dispersion_sample(s);
  Dispersion out;
  out.average = sum / static_cast<double>(samples.size());
  const double max_theoretical = bounds.diagonal() / 2.0;
  out.normalized = max_theoretical > 0.0 ? std::min(1.0, out.average / max_theoretical) : 0.0;
  return out;
}

double avg_center_offset_error(std::span<const Landmark> landmarks) {
  if (landmarks.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& l : landmarks) sum += distance(l.position, l.true_position);
  return sum / static_cast<double>(landmarks.size());
}

TopologyMatch topology_match(std::span<const Landmark> landmarks,
                             std::span<const Feature> features, const Ontology& ontology,
                             double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("match radius must be positive");
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < landmarks.size(); ++i)
    for (std::size_t j = 0; j < features.size(); ++j) {
      const double d = distance(landmarks[i].position, features[j].position);
      if (d > radius) continue;
      if (!ontology.semantically_similar(landmarks[i].feature_class, features[j].feature_class))
        continue;
      pairs.emplace_back(d, i, j);
    }
  std::sort(pairs.begin(), pairs.end());

  TopologyMatch out;
  out.total = features.size();
  std::vector<bool> used_l(landmarks.size(), false);
  std::vector<bool> used_f(features.size(), false);
  double error = 0.0;
  for (const auto& [d, i, j] : pairs) {
    if (used_l[i] || used_f[j]) continue;
    used_l[i] = used_f[j] = true;
    ++out.matched;
    error += d;
  }
  out.coverage = out.total > 0 ? static_cast<double>(out.matched) / static_cast<double>(out.total) : 0.0;
  out.position_error = out.matched > 0 ? error / static_cast<double>(out.matched) : 0.0;
  return out;
}

namespace {

void require_same_shape(const LabelGrid& a, const LabelGrid& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("grid sizes differ: " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()));
}

std::set<std::string> truth_labels(const LabelGrid& truth) {
  std::set<std::string> out(truth.labels().begin(), truth.labels().end());
  out.erase(std::string(kUnknown));
  return out;
}

struct Scored {
  double confidence;
  bool positive;
};

// Area under the block-wise precision-recall curve.
ClassAp ap_from(std::vector<Scored> scored, std::size_t positives, std::string label) {
  ClassAp out;
  out.label = std::move(label);
  out.positives = positives;
  out.predictions = scored.size();
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.confidence > b.confidence; });
  std::size_t tp = 0;
  std::size_t seen = 0;
  std::vector<PrPoint> points;
  for (std::size_t i = 0; i < scored.size();) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].confidence == scored[i].confidence) {
      if (scored[j].positive) ++tp;
      ++j;
    }
    seen = j;
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    const double recall = positives > 0 ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
    points.push_back({recall, precision});
    i = j;
  }
  if (points.empty()) {
    out.curve = {{0.0, 0.0}};
    return out;
  }
  out.curve.push_back({0.0, points.front().precision});
  out.curve.insert(out.curve.end(), points.begin(), points.end());
  for (std::size_t k = 1; k < out.curve.size(); ++k) {
    const PrPoint& a = out.curve[k - 1];
    const PrPoint& b = out.curve[k];
    out.ap += (b.recall - a.recall) * (a.precision + b.precision) / 2.0;
  }
  return out;
}

}  // namespace

double iou(const LabelGrid& pred, const LabelGrid& truth, std::string_view label) {
  require_same_shape(pred, truth);
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.labels()[i] == label;
    const bool t = truth.labels()[i] == label;
    inter += (p && t) ? 1 : 0;
    uni += (p || t) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::map<std::string, double> iou_per_label(const LabelGrid& pred, const LabelGrid& truth) {
  std::map<std::string, double> out;
  for (const auto& l : truth_labels(truth)) out[l] = iou(pred, truth, l);
  return out;
}

double macro_iou(const LabelGrid& pred, const LabelGrid& truth) {
  const auto per = iou_per_label(pred, truth);
  if (per.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [_, v] : per) sum += v;
  return sum / static_cast<double>(per.size());
}

ApSummary precision_recall_ap(const LabelGrid& pred, const LabelGrid& truth) {
  require_same_shape(pred, truth);
  ApSummary out;
  const auto& pl = pred.labels();
  const auto& tl = truth.labels();
  std::vector<Scored> pooled;
  std::size_t pooled_positives = 0;
  for (const auto& label : truth_labels(truth)) {
    std::vector<Scored> scored;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < pl.size(); ++i) {
      if (tl[i] == label) ++positives;
      if (pl[i] == label) scored.push_back({pred.confidence(static_cast<int>(i) / pred.cols(),
                                                            static_cast<int>(i) % pred.cols()),
                                            tl[i] == label});
    }
    out.per_class.push_back(ap_from(std::move(scored), positives, label));
  }
  for (std::size_t i = 0; i < pl.size(); ++i) {
    if (tl[i] != kUnknown) ++pooled_positives;
    if (pl[i] == kUnknown) continue;
    pooled.push_back({pred.confidence(static_cast<int>(i) / pred.cols(), static_cast<int>(i) % pred.cols()),
                      pl[i] == tl[i]});
  }
  double sum = 0.0;
  for (const auto& c : out.per_class) sum += c.ap;
  out.mean_ap = out.per_class.empty() ? 0.0 : sum / static_cast<double>(out.per_class.size());
  out.micro_ap = ap_from(std::move(pooled), pooled_positives, "").ap;
  return out;
}

double explored_accuracy(const LabelGrid& pred, const LabelGrid& truth,
                         const std::vector<bool>& explored) {
  require_same_shape(pred, truth);
  if (explored.size() != pred.size()) throw InvalidArgument("explored mask size differs from grid");
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!explored[i] || truth.labels()[i] == kUnknown) continue;
    ++total;
    if (pred.labels()[i] == truth.labels()[i]) ++correct;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::string report_csv_header() {
  return "scenario,seed,agents,features,static_features,landmarks,all_discovered,steps,"
         "elapsed_s,area_km2,searched_area_km2,coverage_ratio,tracked_ratio,avg_dispersion_km,"
         "normalized_dispersion,er_final_km,topology_coverage,position_error_km,"
         "grid_macro_iou,grid_map,grid_micro_ap,grid_explored_accuracy,"
         "branch_macro_iou,branch_map,branch_micro_ap,branch_explored_accuracy";
}

std::string report_csv_row(const TrialReport& r) {
  std::ostringstream os;
  const auto d = [](double v) { return format_double(v); };
  os << r.scenario << ',' << r.seed << ',' << r.agents << ',' << r.feature_count << ','
     << r.static_feature_count << ',' << r.landmark_count << ',' << (r.all_discovered ? 1 : 0)
     << ',' << r.steps << ',' << d(r.elapsed_seconds) << ',' << d(r.coverage.total_area) << ','
     << d(r.coverage.searched_area) << ',' << d(r.coverage.ratio) << ','
     << d(r.coverage.tracked_ratio) << ',' << d(r.dispersion.average) << ','
     << d(r.dispersion.normalized) << ',' << d(r.er_final) << ',' << d(r.topology.coverage) << ','
     << d(r.topology.position_error) << ',' << d(r.grid.macro_iou) << ',' << d(r.grid.mean_ap)
     << ',' << d(r.grid.micro_ap) << ',' << d(r.grid.explored_accuracy) << ','
     << d(r.branch.macro_iou) << ',' << d(r.branch.mean_ap) << ',' << d(r.branch.micro_ap) << ','
     << d(r.branch.explored_accuracy);
  return os.str();
}

std::string report_to_json(const TrialReport& r) {
  using nlohmann::ordered_json;
  const auto scores = [](const MethodScores& m, const std::map<std::string, double>& per) {
    ordered_json j;
    j["macro_iou"] = m.macro_iou;
    j["map"] = m.mean_ap;
    j["micro_ap"] = m.micro_ap;
    j["explored_accuracy"] = m.explored_accuracy;
    j["iou"] = ordered_json::object();
    for (const auto& [k, v] : per) j["iou"][k] = v;
    return j;
  };
  ordered_json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["agents"] = r.agents;
  j["features"] = r.feature_count;
  j["static_features"] = r.static_feature_count;
  j["landmarks"] = r.landmark_count;
  j["all_discovered"] = r.all_discovered;
  j["steps"] = r.steps;
  j["elapsed_s"] = r.elapsed_seconds;
  j["coverage"] = {{"area_km2", r.coverage.total_area},
                   {"searched_area_km2", r.coverage.searched_area},
                   {"ratio", r.coverage.ratio},
                   {"tracked_ratio", r.coverage.tracked_ratio}};
  j["dispersion"] = {{"average_km", r.dispersion.average},
                     {"normalized", r.dispersion.normalized}};
  j["er"] = {{"final_km", r.er_final}, {"times_s", r.er_times}, {"series_km", r.er_series}};
  j["topology"] = {{"matched", r.topology.matched},
                   {"total", r.topology.total},
                   {"coverage", r.topology.coverage},
                   {"position_error_km", r.topology.position_error}};
  j["grid"] = scores(r.grid, r.grid_iou);
  j["branch"] = scores(r.branch, r.branch_iou);
  return j.dump(2) + "\n";
}

}  // namespace ctxslam
