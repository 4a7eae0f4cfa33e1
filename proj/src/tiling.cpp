#include "partimax/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace partimax {

void validate(const TileCodingConfig& c) {
  if (c.image_width <= 0 || c.image_height <= 0)
    throw std::invalid_argument("image dimensions must be positive");
  if (c.box_width <= 0 || c.box_height <= 0)
    throw std::invalid_argument("box dimensions must be positive");
  if (c.offset_x <= 0 || c.offset_x > c.box_width || c.offset_y <= 0 ||
      c.offset_y > c.box_height)
    throw std::invalid_argument("offsets must lie in (0, box size]");
  if (c.box_width % c.offset_x != 0 || c.box_height % c.offset_y != 0)
    throw std::invalid_argument("offset " + std::to_string(c.offset_x) + "x" +
                                std::to_string(c.offset_y) +
                                " does not divide box " +
                                std::to_string(c.box_width) + "x" +
                                std::to_string(c.box_height));
}

std::size_t tiling_count(const TileCodingConfig& c) {
  validate(c);
  return std::lcm(static_cast<std::size_t>(c.box_width / c.offset_x),
                  static_cast<std::size_t>(c.box_height / c.offset_y));
}

namespace {

// Tiles along one axis needed to cover [0, extent] when the grid lines sit at
// shift + i * size.
int tiles_along(int extent, int shift, int size, int lead) {
  const int last = static_cast<int>(
      std::floor(static_cast<double>(extent - shift) / size));
  return last + 1 + lead;
}

}  // namespace

TileCoding::TileCoding(const TileCodingConfig& config) : config_(config) {
  const std::size_t t = tiling_count(config_);
  tilings_.reserve(t);
  BoxIndex base = 0;
  for (std::size_t j = 0; j < t; ++j) {
    Tiling tl{};
    tl.shift_x = static_cast<int>((j * config_.offset_x) % config_.box_width);
    tl.shift_y = static_cast<int>((j * config_.offset_y) % config_.box_height);
    tl.lead_x = tl.shift_x > 0 ? 1 : 0;
    tl.lead_y = tl.shift_y > 0 ? 1 : 0;
    tl.cols = tiles_along(config_.image_width, tl.shift_x, config_.box_width,
                          tl.lead_x);
    tl.rows = tiles_along(config_.image_height, tl.shift_y, config_.box_height,
                          tl.lead_y);
    tl.base = base;
    base += static_cast<BoxIndex>(tl.cols * tl.rows);
    tilings_.push_back(tl);
  }
  box_count_ = base;

  cells_x_ = config_.image_width / config_.offset_x + 1;
  cells_y_ = config_.image_height / config_.offset_y + 1;
  cell_of_pixel_x_.resize(static_cast<std::size_t>(config_.image_width) + 1);
  for (std::size_t v = 0; v < cell_of_pixel_x_.size(); ++v)
    cell_of_pixel_x_[v] = static_cast<std::uint32_t>(v / config_.offset_x);
  cell_of_pixel_y_.resize(static_cast<std::size_t>(config_.image_height) + 1);
  for (std::size_t v = 0; v < cell_of_pixel_y_.size(); ++v)
    cell_of_pixel_y_[v] = static_cast<std::uint32_t>(v / config_.offset_y);
  col_of_cell_.resize(t * cells_x_);
  row_of_cell_.resize(t * cells_y_);
  // The row table holds the box of (0, y); the column table the step from
  // (0, 0) to (x, 0).
  for (std::size_t j = 0; j < t; ++j) {
    const BoxIndex origin = cover_in_tiling(0, 0, j);
    for (int c = 0; c < cells_x_; ++c)
      col_of_cell_[c * t + j] =
          cover_in_tiling(static_cast<double>(c) * config_.offset_x, 0, j) - origin;
    for (int r = 0; r < cells_y_; ++r)
      row_of_cell_[r * t + j] =
          cover_in_tiling(0, static_cast<double>(r) * config_.offset_y, j);
  }

  // Cells of each box, read back from the tables so edge clamping agrees.
  cells_of_box_.assign(box_count_, CellRange{cells_x_, 0, cells_y_, 0});
  for (int r = 0; r < cells_y_; ++r)
    for (int c = 0; c < cells_x_; ++c)
      for (std::size_t j = 0; j < t; ++j) {
        CellRange& range = cells_of_box_[box_at({c, r}, j)];
        range.x0 = std::min(range.x0, c);
        range.x1 = std::max(range.x1, c + 1);
        range.y0 = std::min(range.y0, r);
        range.y1 = std::max(range.y1, r + 1);
      }
  for (CellRange& range : cells_of_box_)
    if (range.x0 >= range.x1 || range.y0 >= range.y1) range = CellRange{};
}

std::size_t TileCoding::boxes_in_tiling(std::size_t j) const {
  const auto& tl = tilings_.at(j);
  return static_cast<std::size_t>(tl.cols) * tl.rows;
}

BoxIndex TileCoding::tiling_begin(std::size_t j) const {
  return tilings_.at(j).base;
}

double TileCoding::clamp_x(double x) const {
  return std::clamp(x, 0.0, static_cast<double>(config_.image_width));
}

double TileCoding::clamp_y(double y) const {
  return std::clamp(y, 0.0, static_cast<double>(config_.image_height));
}

BoxIndex TileCoding::cover_in_tiling(double x, double y, std::size_t j) const {
  const Tiling& tl = tilings_[j];
  const double cx = clamp_x(x);
  const double cy = clamp_y(y);
  int col = static_cast<int>(std::floor((cx - tl.shift_x) / config_.box_width)) +
            tl.lead_x;
  int row = static_cast<int>(std::floor((cy - tl.shift_y) / config_.box_height)) +
            tl.lead_y;
  col = std::clamp(col, 0, tl.cols - 1);
  row = std::clamp(row, 0, tl.rows - 1);
  return tl.base + static_cast<BoxIndex>(row * tl.cols + col);
}

void TileCoding::covers(double x, double y, std::span<BoxIndex> out) const {
  const std::size_t t = std::min(tilings_.size(), out.size());
  const Cell c = cell_of(x, y);
  for (std::size_t j = 0; j < t; ++j) out[j] = box_at(c, j);
}

std::vector<BoxIndex> TileCoding::covers(double x, double y) const {
  std::vector<BoxIndex> out(tilings_.size());
  covers(x, y, out);
  return out;
}

PixelBox TileCoding::box(BoxIndex i) const {
  if (i >= box_count_) throw std::out_of_range("box index out of range");
  auto it = std::upper_bound(
      tilings_.begin(), tilings_.end(), i,
      [](BoxIndex v, const Tiling& tl) { return v < tl.base; });
  const auto j = static_cast<std::size_t>(std::distance(tilings_.begin(), it)) - 1;
  const Tiling& tl = tilings_[j];
  const int local = static_cast<int>(i - tl.base);
  PixelBox b;
  b.tiling = static_cast<int>(j);
  b.col = local % tl.cols;
  b.row = local / tl.cols;
  b.x0 = tl.shift_x + static_cast<double>(b.col - tl.lead_x) * config_.box_width;
  b.y0 = tl.shift_y + static_cast<double>(b.row - tl.lead_y) * config_.box_height;
  b.x1 = b.x0 + config_.box_width;
  b.y1 = b.y0 + config_.box_height;
  return b;
}

bool TileCoding::contains(BoxIndex i, double x, double y) const {
  const PixelBox b = box(i);
  const double cx = clamp_x(x);
  const double cy = clamp_y(y);
  return cx >= b.x0 && cx < b.x1 && cy >= b.y0 && cy < b.y1;
}

}  // namespace partimax
