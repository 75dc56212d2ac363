#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ctxslam/geometry.hpp"
#include "ctxslam/ontology.hpp"

namespace ctxslam {

inline constexpr int kEvalGridSize = 24;

// Environment label per cell with an optional per-cell confidence. Row 0 is
// the southern strip (smallest y), column 0 the western strip.
class LabelGrid {
 public:
  LabelGrid(int rows = kEvalGridSize, int cols = kEvalGridSize,
            std::string fill = std::string(kUnknown));

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return labels_.size(); }

  const std::string& label(int row, int col) const { return labels_[index(row, col)]; }
  double confidence(int row, int col) const { return confidence_[index(row, col)]; }
  void set(int row, int col, std::string label, double confidence = 1.0);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t count(std::string_view label) const;

  // Cell rectangle and centre for a grid laid over `bounds`.
  static Rect cell_rect(const Rect& bounds, int rows, int cols, int row, int col);
  // Cell holding p; points on the far edges map to the last row/column.
  static std::pair<int, int> cell_of(const Rect& bounds, int rows, int cols, Vec2 p);

  friend bool operator==(const LabelGrid&, const LabelGrid&) = default;

 private:
  std::size_t index(int row, int col) const;

  int rows_;
  int cols_;
  std::vector<std::string> labels_;
  std::vector<double> confidence_;
};

// CSV with header "row,col,label,confidence", one line per cell in row-major order.
std::string grid_to_csv(const LabelGrid& grid);
LabelGrid grid_from_csv(std::string_view csv);
LabelGrid load_grid_csv(const std::filesystem::path& path);

}  // namespace ctxslam
