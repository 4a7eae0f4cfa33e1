#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace partimax {

using BoxIndex = std::uint32_t;

struct TileCodingConfig {
  int image_width = 5120;
  int image_height = 3840;
  int box_width = 180;
  int box_height = 180;
  int offset_x = 60;
  int offset_y = 30;

  bool operator==(const TileCodingConfig&) const = default;
};

/// Axis-aligned, half-open rectangle [x0, x1) x [y0, y1) of one pixel box.
struct PixelBox {
  int tiling = 0;
  int col = 0;
  int row = 0;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double center_x() const { return 0.5 * (x0 + x1); }
  double center_y() const { return 0.5 * (y0 + y1); }
};

/**
 * A family of t offset tilings of the (closed) image plane [0, W] x [0, H].
 *
 * Tiling j is shifted by (j * offset_x mod box_width, j * offset_y mod
 * box_height). Each tiling is padded past the image edges so that it still
 * partitions the plane; boxes may overhang. Flat indices are tiling-major,
 * then row-major inside a tiling.
 *
 * Immutable after construction.
 */
class TileCoding {
 public:
  /// Throws std::invalid_argument when the offsets do not divide the box size.
  explicit TileCoding(const TileCodingConfig& config);

  const TileCodingConfig& config() const { return config_; }
  std::size_t tilings() const { return tilings_.size(); }
  std::size_t box_count() const { return box_count_; }
  double width() const { return config_.image_width; }
  double height() const { return config_.image_height; }

  /// Number of boxes in tiling j, i.e. the cost of running the detector over
  /// one full partition of the plane.
  std::size_t boxes_in_tiling(std::size_t j) const;
  /// First flat index of tiling j.
  BoxIndex tiling_begin(std::size_t j) const;

  /// The box of tiling j containing (x, y); positions are clamped to the plane.
  BoxIndex cover_in_tiling(double x, double y, std::size_t j) const;

  /// Cell of the offset grid (offset_x by offset_y) holding a clamped
  /// position. Every tiling's grid lines fall on cell edges, so a cell lies
  /// in exactly one box per tiling.
  struct Cell {
    int x = 0, y = 0;
  };
  /// Half-open range of cells inside one box.
  struct CellRange {
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    bool contains(Cell c) const { return c.x >= x0 && c.x < x1 && c.y >= y0 && c.y < y1; }
  };

  Cell cell_of(double x, double y) const {
    return {cell_index(x, config_.image_width, cell_of_pixel_x_),
            cell_index(y, config_.image_height, cell_of_pixel_y_)};
  }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(cells_x_) * static_cast<std::size_t>(cells_y_);
  }
  /// Row-major index of c in [0, cell_count()).
  std::size_t cell_id(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(cells_x_) +
           static_cast<std::size_t>(c.x);
  }
  /// The box of tiling j holding cell c.
  BoxIndex box_at(Cell c, std::size_t j) const {
    const std::size_t t = tilings_.size();
    return row_of_cell_[static_cast<std::size_t>(c.y) * t + j] +
           col_of_cell_[static_cast<std::size_t>(c.x) * t + j];
  }
  /// Calls f(box) for the t boxes holding cell c, in tiling order.
  template <typename F>
  void for_each_box(Cell c, F&& f) const {
    const std::size_t t = tilings_.size();
    const BoxIndex* rows = row_of_cell_.data() + static_cast<std::size_t>(c.y) * t;
    const BoxIndex* cols = col_of_cell_.data() + static_cast<std::size_t>(c.x) * t;
    for (std::size_t j = 0; j < t; ++j) f(rows[j] + cols[j]);
  }
  /// Cells lying in box i (empty for a box holding no clamped position).
  const CellRange& cells_in(BoxIndex i) const { return cells_of_box_[i]; }

  /// Writes the t covering boxes, ordered by tiling index, into out.
  void covers(double x, double y, std::span<BoxIndex> out) const;
  std::vector<BoxIndex> covers(double x, double y) const;

  PixelBox box(BoxIndex i) const;
  bool contains(BoxIndex i, double x, double y) const;

  double clamp_x(double x) const;
  double clamp_y(double y) const;

 private:
  struct Tiling {
    int shift_x, shift_y;
    int lead_x, lead_y;  // 1 when a padding column/row precedes the shift
    int cols, rows;
    BoxIndex base;
  };

  // Cell edges lie on whole pixels, so the floored pixel decides the cell.
  static int cell_index(double v, int extent, const std::vector<std::uint32_t>& cell_of_pixel) {
    const double cv = v >= 0 ? (v < extent ? v : static_cast<double>(extent)) : 0.0;
    return static_cast<int>(cell_of_pixel[static_cast<std::size_t>(cv)]);
  }

  TileCodingConfig config_;
  std::vector<Tiling> tilings_;
  std::size_t box_count_ = 0;
  int cells_x_ = 0, cells_y_ = 0;
  std::vector<std::uint32_t> cell_of_pixel_x_;  // [0, image_width]
  std::vector<std::uint32_t> cell_of_pixel_y_;  // [0, image_height]
  std::vector<BoxIndex> col_of_cell_;  // [cell_x][tiling]
  std::vector<BoxIndex> row_of_cell_;  // [cell_y][tiling]
  std::vector<CellRange> cells_of_box_;
};

/// lcm(box_width / offset_x, box_height / offset_y).
std::size_t tiling_count(const TileCodingConfig& config);

void validate(const TileCodingConfig& config);

}  // namespace partimax
