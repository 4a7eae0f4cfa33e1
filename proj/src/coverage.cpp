#include "partimax/coverage.hpp"


namespace partimax {

std::size_t pcf(std::span<const State> particles,
                std::span<const BoxIndex> boxes, const TileCoding& coder) {
  std::size_t count = 0;
  for (const State& s : particles) {
    for (BoxIndex b : boxes) {
      if (coder.contains(b, s.x, s.y)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

GainTable::GainTable(const TileCoding& coder)
    : coder_(&coder),
      t_(coder.tilings()),
      delta_(coder.box_count(), 0),
      slot_of_cell_(coder.cell_count(), -1) {}

void GainTable::initialize(std::span<const State> particles) {
  const TileCoding& coder = *coder_;
  std::int32_t* delta = delta_.data();
  // Reset only what the previous belief touched.
  for (TileCoding::Cell c : slot_cell_) {
    slot_of_cell_[coder.cell_id(c)] = -1;
    coder.for_each_box(c, [&](BoxIndex b) { delta[b] = 0; });
  }
  slot_cell_.clear();
  slot_count_.clear();

  const std::size_t m = particles.size();
  slot_of_particle_.resize(m);
  for (std::size_t p = 0; p < m; ++p) {
    const TileCoding::Cell c = coder.cell_of(particles[p].x, particles[p].y);
    std::int32_t& slot = slot_of_cell_[coder.cell_id(c)];
    if (slot < 0) {
      slot = static_cast<std::int32_t>(slot_cell_.size());
      slot_cell_.push_back(c);
      slot_count_.push_back(0);
    }
    ++slot_count_[static_cast<std::size_t>(slot)];
    slot_of_particle_[p] = static_cast<std::uint32_t>(slot);
  }
  for (std::size_t s = 0; s < slot_cell_.size(); ++s) {
    const std::int32_t count = slot_count_[s];
    coder.for_each_box(slot_cell_[s], [&](BoxIndex b) { delta[b] += count; });
  }
  slot_covered_.assign(slot_cell_.size(), 0);
  uncovered_ = m;
}

std::vector<std::uint32_t> GainTable::phi(BoxIndex box) const {
  std::vector<std::uint32_t> out;
  if (delta_[box] == 0) return out;
  const TileCoding::CellRange& range = coder_->cells_in(box);
  for (std::size_t p = 0; p < slot_of_particle_.size(); ++p) {
    const std::uint32_t s = slot_of_particle_[p];
    if (!slot_covered_[s] && range.contains(slot_cell_[s]))
      out.push_back(static_cast<std::uint32_t>(p));
  }
  return out;
}

void GainTable::apply(BoxIndex box) {
  std::int32_t remaining = delta_[box];
  if (remaining == 0) return;
  const TileCoding& coder = *coder_;
  const TileCoding::CellRange& range = coder.cells_in(box);
  std::int32_t* delta = delta_.data();
  for (int y = range.y0; y < range.y1 && remaining > 0; ++y) {
    for (int x = range.x0; x < range.x1 && remaining > 0; ++x) {
      const TileCoding::Cell c{x, y};
      const std::int32_t slot = slot_of_cell_[coder.cell_id(c)];
      if (slot < 0 || slot_covered_[static_cast<std::size_t>(slot)]) continue;
      const std::int32_t count = slot_count_[static_cast<std::size_t>(slot)];
      slot_covered_[static_cast<std::size_t>(slot)] = 1;
      uncovered_ -= static_cast<std::size_t>(count);
      remaining -= count;
      coder.for_each_box(c, [&](BoxIndex b) { delta[b] -= count; });
    }
  }
}

}  // namespace partimax
