#include "ctxslam/label_grid.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ctxslam/error.hpp"
#include "ctxslam/io.hpp"

namespace ctxslam {

LabelGrid::LabelGrid(int rows, int cols, std::string fill)
    : rows_(rows),
      cols_(cols),
      labels_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill),
      confidence_(labels_.size(), 0.0) {
  if (rows <= 0 || cols <= 0) throw InvalidArgument("grid dimensions must be positive");
}

std::size_t LabelGrid::index(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
    throw InvalidArgument("grid cell out of range");
  return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
         static_cast<std::size_t>(col);
}

void LabelGrid::set(int row, int col, std::string label, double confidence) {
  const std::size_t i = index(row, col);
  labels_[i] = std::move(label);
  confidence_[i] = confidence;
}

std::size_t LabelGrid::count(std::string_view label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

Rect LabelGrid::cell_rect(const Rect& bounds, int rows, int cols, int row, int col) {
  const double cw = bounds.width() / cols;
  const double ch = bounds.height() / rows;
  return Rect{{bounds.min.x + col * cw, bounds.min.y + row * ch},
              {bounds.min.x + (col + 1) * cw, bounds.min.y + (row + 1) * ch}};
}

std::pair<int, int> LabelGrid::cell_of(const Rect& bounds, int rows, int cols, Vec2 p) {
  const double fx = (p.x - bounds.min.x) / bounds.width() * cols;
  const double fy = (p.y - bounds.min.y) / bounds.height() * rows;
  const int col = std::clamp(static_cast<int>(std::floor(fx)), 0, cols - 1);
  const int row = std::clamp(static_cast<int>(std::floor(fy)), 0, rows - 1);
  return {row, col};
}

std::string grid_to_csv(const LabelGrid& grid) {
  std::string out = "row,col,label,confidence\n";
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      out += std::to_string(r) + ',' + std::to_string(c) + ',' + grid.label(r, c) + ',' +
             format_double(grid.confidence(r, c)) + '\n';
    }
  return out;
}

LabelGrid grid_from_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("row,col,label,confidence", 0) != 0)
    throw ParseError("grid csv: missing header");

  struct Cell {
    int row, col;
    std::string label;
    double conf;
  };
  std::vector<Cell> cells;
  int max_row = -1;
  int max_col = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream ls(line);
    std::string part;
    while (std::getline(ls, part, ',')) parts.push_back(part);
    if (parts.size() != 4) throw ParseError("grid csv: expected 4 fields: " + line);
    Cell cell{};
    try {
      cell.row = std::stoi(parts[0]);
      cell.col = std::stoi(parts[1]);
      cell.conf = std::stod(parts[3]);
    } catch (const std::exception&) {
      throw ParseError("grid csv: bad number in: " + line);
    }
    cell.label = parts[2];
    if (cell.row < 0 || cell.col < 0) throw ParseError("grid csv: negative index: " + line);
    max_row = std::max(max_row, cell.row);
    max_col = std::max(max_col, cell.col);
    cells.push_back(std::move(cell));
  }
  if (cells.empty()) throw ParseError("grid csv: no cells");
  if (cells.size() != static_cast<std::size_t>(max_row + 1) * static_cast<std::size_t>(max_col + 1))
    throw ParseError("grid csv: cell count does not form a full grid");
  LabelGrid grid(max_row + 1, max_col + 1);
  for (auto& c : cells) grid.set(c.row, c.col, std::move(c.label), c.conf);
  return grid;
}

LabelGrid load_grid_csv(const std::filesystem::path& path) {
  return grid_from_csv(read_text_file(path));
}

}  // namespace ctxslam
