#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "partimax/belief.hpp"
#include "partimax/select.hpp"
#include "partimax/tiling.hpp"

namespace partimax {

/// Outcome of one bound/oracle suite.
struct SuiteResult {
  std::string name;
  bool passed = false;
  double margin = 0;      // > 0 means slack; suite-specific units (see detail)
  std::string detail;
  std::optional<std::uint64_t> failing_seed;
  double seconds = 0;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Swaps the proportional sampler for a uniform one in the proportional suite.
  BoxSampling proportional_sampling = BoxSampling::proportional;
};

/// nemhauser, sgm, coverage, generic, partimax, proportional
std::span<const std::string_view> suite_names();

/// Throws std::invalid_argument for an unknown name.
SuiteResult run_suite(std::string_view name, const VerifyOptions& options);

std::string format_suite_line(const SuiteResult& result);

// Instance builders shared with the tests.

/// The 180x180 / 60x30 tiling on a 60x270 plane: t = 6, n = 20.
TileCodingConfig small_overlapping_geometry();
/// A 100x100 grid (t = 1) on a 499x399 plane: n = 20.
TileCodingConfig small_grid_geometry();

/// m particles drawn around 1-3 random centres (spread ~ half a box),
/// clamped to the plane, zero velocity.
std::vector<State> clustered_particles(const TileCoding& coder, std::size_t m,
                                       Rng& rng);

/// Total-variation distance between two distributions over the same support.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace partimax
