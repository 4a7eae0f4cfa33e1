#pragma once

// Brute-force references used only by the tests. They read box geometry
// through TileCoding::box() and nothing else from the library.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "partimax/belief.hpp"
#include "partimax/tiling.hpp"

namespace partimax::testing {

inline bool inside(const PixelBox& b, const TileCoding& coder, const State& s) {
  const double x = std::clamp(s.x, 0.0, coder.width());
  const double y = std::clamp(s.y, 0.0, coder.height());
  return x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1;
}

/// Particles inside at least one of `boxes`.
inline std::size_t scan_pcf(const TileCoding& coder, std::span<const State> ps,
                            std::span<const BoxIndex> boxes) {
  std::vector<PixelBox> rects;
  for (BoxIndex b : boxes) rects.push_back(coder.box(b));
  std::size_t count = 0;
  for (const State& s : ps)
    count += std::any_of(rects.begin(), rects.end(),
                         [&](const PixelBox& r) { return inside(r, coder, s); });
  return count;
}

/// Best pcf over all k-subsets, by permuting a selection mask.
inline std::size_t brute_optimum(const TileCoding& coder, std::span<const State> ps,
                                 std::size_t k) {
  const std::size_t n = coder.box_count();
  std::vector<char> mask(n, 0);
  std::fill(mask.end() - static_cast<std::ptrdiff_t>(k), mask.end(), 1);
  std::size_t best = 0;
  std::vector<BoxIndex> chosen;
  do {
    chosen.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) chosen.push_back(static_cast<BoxIndex>(i));
    best = std::max(best, scan_pcf(coder, ps, chosen));
  } while (std::next_permutation(mask.begin(), mask.end()));
  return best;
}

}  // namespace partimax::testing
