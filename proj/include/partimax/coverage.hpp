#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "partimax/belief.hpp"
#include "partimax/tiling.hpp"

namespace partimax {

/// Particle coverage: number of particles inside at least one box of
/// `boxes`. Plain scan over particles x boxes.
std::size_t pcf(std::span<const State> particles,
                std::span<const BoxIndex> boxes, const TileCoding& coder);

/**
 * Per-box marginal gains of particle coverage, maintained incrementally as
 * boxes are added to the selection.
 *
 * delta(i) is the number of particles covered by box i and not yet covered
 * by the applied boxes; phi(i) lists exactly those particles (indices into
 * the belief passed to initialize()). Particles sharing an offset-grid cell
 * are covered by the same boxes, so the table works on occupied cells
 * weighted by their particle count, and phi(i) is recovered by a scan.
 *
 * initialize() costs O(m + c t), where c <= m is the number of occupied
 * cells; apply() visits the cells of one box and costs O(t) per newly
 * covered cell. Neither depends on the number of boxes after the first use.
 */
class GainTable {
 public:
  explicit GainTable(const TileCoding& coder);

  void initialize(std::span<const State> particles);

  /// Marks every particle of phi(box) covered and decrements the gain of
  /// all t boxes that cover it. Applying an exhausted box is a no-op.
  void apply(BoxIndex box);

  std::int32_t gain(BoxIndex box) const { return delta_[box]; }
  std::span<const std::int32_t> gains() const { return delta_; }
  /// Uncovered particles inside box, in index order.
  std::vector<std::uint32_t> phi(BoxIndex box) const;

  bool covered(std::size_t particle) const { return slot_covered_[slot_of_particle_[particle]] != 0; }
  std::size_t uncovered() const { return uncovered_; }
  std::size_t particle_count() const { return slot_of_particle_.size(); }
  std::size_t tilings() const { return t_; }
  std::size_t box_count() const { return delta_.size(); }
  const TileCoding& coder() const { return *coder_; }

  /// The box of tiling j covering a particle.
  BoxIndex cover_of(std::size_t particle, std::size_t j) const {
    return coder_->box_at(slot_cell_[slot_of_particle_[particle]], j);
  }

 private:
  const TileCoding* coder_;
  std::size_t t_;
  std::vector<std::int32_t> delta_;             // dense, one per box
  std::vector<std::int32_t> slot_of_cell_;      // dense, one per cell; -1 if empty
  std::vector<TileCoding::Cell> slot_cell_;     // occupied cells
  std::vector<std::int32_t> slot_count_;        // particles per occupied cell
  std::vector<char> slot_covered_;
  std::vector<std::uint32_t> slot_of_particle_;
  std::size_t uncovered_ = 0;
};

}  // namespace partimax
