#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ctxslam/geometry.hpp"
#include "ctxslam/label_grid.hpp"
#include "ctxslam/landmark.hpp"
#include "ctxslam/ontology.hpp"
#include "ctxslam/scenario.hpp"

namespace ctxslam {

// ---------------------------------------------------------------------------
// Multi-agent coverage and dispersion

// Occupancy cells of side `cell_side` over `bounds`, marked as agents pass.
class CoverageTracker {
 public:
  CoverageTracker(const Rect& bounds, double cell_side);

  void visit(Vec2 p);
  // Marks the cells along the segment, sampled at a quarter cell side.
  void visit_segment(Vec2 a, Vec2 b);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool visited(int row, int col) const { return cells_[row * cols_ + col]; }
  std::size_t visited_count() const { return visited_; }
  double tracked_ratio() const;

 private:
  Rect bounds_;
  double cell_w_;
  double cell_h_;
  int rows_;
  int cols_;
  std::vector<bool> cells_;
  std::size_t visited_ = 0;
};

struct AreaCoverage {
  double total_area = 0.0;     // A, km^2
  double searched_area = 0.0;  // A' = V W t summed over agents, capped at A
  double ratio = 0.0;          // A' / A
  double tracked_ratio = 0.0;
};

AreaCoverage area_coverage(double speed, double sweep_width, double elapsed_seconds,
                           int agent_count, double total_area, double tracked_ratio);

// Mean agent distance to the centre of mass for one sample.
double dispersion_sample(std::span<const Vec2> positions);

struct Dispersion {
  double average = 0.0;     // km
  double normalized = 0.0;  // average / half the bounds diagonal
};

// Throws InvalidArgument when there are no samples.
Dispersion dispersion(std::span<const std::vector<Vec2>> samples, const Rect& bounds);

// ---------------------------------------------------------------------------
// SLAM accuracy

// Mean distance between believed and true landmark positions; 0 for an empty map.
double avg_center_offset_error(std::span<const Landmark> landmarks);

struct TopologyMatch {
  std::size_t matched = 0;
  std::size_t total = 0;
  double coverage = 0.0;        // matched / total
  double position_error = 0.0;  // km, mean over matched pairs
};

// Greedy pairing, closest first, between landmarks and true features of
// semantically similar class within `radius`. Throws InvalidArgument for a
// non-positive radius.
TopologyMatch topology_match(std::span<const Landmark> landmarks,
                             std::span<const Feature> features, const Ontology& ontology,
                             double radius);

// ---------------------------------------------------------------------------
// Classification maps

// Intersection over union of the cells carrying `label`. Two grids without
// the label score 1. Throws InvalidArgument on a size mismatch.
double iou(const LabelGrid& pred, const LabelGrid& truth, std::string_view label);

// Mean IoU over the labels present in `truth`, Unknown excluded.
double macro_iou(const LabelGrid& pred, const LabelGrid& truth);
std::map<std::string, double> iou_per_label(const LabelGrid& pred, const LabelGrid& truth);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct ClassAp {
  std::string label;
  std::size_t positives = 0;    // truth cells of the class
  std::size_t predictions = 0;  // cells predicted as the class
  std::vector<PrPoint> curve;   // starts at recall 0
  double ap = 0.0;
};

struct ApSummary {
  std::vector<ClassAp> per_class;  // classes present in truth, Unknown excluded
  double mean_ap = 0.0;            // macro over per_class
  double micro_ap = 0.0;           // all predictions pooled
};

// Cells are the prediction unit, ranked by confidence; cells tied on
// confidence enter the curve together. Unknown predictions are never
// positives, so unexplored truth cells count as misses. AP is the
// trapezoidal area under the curve, which starts at (0, first precision).
// Throws InvalidArgument on a size mismatch.
ApSummary precision_recall_ap(const LabelGrid& pred, const LabelGrid& truth);

// Fraction of cells with explored[i] and a known truth label where the
// prediction matches. 0 when no such cell exists.
double explored_accuracy(const LabelGrid& pred, const LabelGrid& truth,
                         const std::vector<bool>& explored);

// ---------------------------------------------------------------------------
// Trial report

struct MethodScores {
  double macro_iou = 0.0;
  double mean_ap = 0.0;
  double micro_ap = 0.0;
  double explored_accuracy = 0.0;
};

struct TrialReport {
  std::string scenario;
  std::uint64_t seed = 0;
  int agents = 0;
  std::size_t feature_count = 0;
  std::size_t static_feature_count = 0;
  std::size_t landmark_count = 0;
  bool all_discovered = false;
  long steps = 0;
  double elapsed_seconds = 0.0;
  AreaCoverage coverage;
  Dispersion dispersion;
  std::vector<double> er_times;   // s
  std::vector<double> er_series;  // km, one sample per sync
  double er_final = 0.0;
  TopologyMatch topology;
  MethodScores grid;
  MethodScores branch;
  std::map<std::string, double> grid_iou;
  std::map<std::string, double> branch_iou;
};

// Stable column order; the CSV row matches report_csv_header().
std::string report_csv_header();
std::string report_csv_row(const TrialReport& report);
std::string report_to_json(const TrialReport& report);

}  // namespace ctxslam
