#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "partimax/belief.hpp"
#include "partimax/coverage.hpp"
#include "partimax/tiling.hpp"

namespace partimax {

/// Ordered set of selected boxes with diagnostics.
struct Selection {
  std::vector<BoxIndex> boxes;     // selection order
  std::size_t utility = 0;         // pcf of boxes on the selector's belief
  std::uint64_t gain_evaluations = 0;
  std::uint64_t sample_draws = 0;  // particle draws inside sampleP
  std::uint64_t rejected_draws = 0;
  double elapsed_us = 0;
};

struct SelectorParams {
  std::size_t k = 40;
  std::size_t r = 10;
  std::uint64_t seed = 1;
  std::size_t max_rejects = 0;  // 0 selects the default of 50 r

  std::size_t effective_max_rejects() const { return max_rejects ? max_rejects : 50 * r; }
};

/// Throws std::invalid_argument unless 1 <= k <= n, 1 <= r and
/// max_rejects >= r.
void validate(const SelectorParams& params, std::size_t box_count);

/// How sample_p turns an accepted particle into a box. Only `proportional`
/// is the real sampler; `uniform_control` draws a box uniformly from all
/// boxes and exists so the verification suites can show they detect a
/// broken sampler.
enum class BoxSampling { proportional, uniform_control };

struct SampleStats {
  std::uint64_t draws = 0;
  std::uint64_t rejected = 0;
};

/// Particle-then-box sampling of up to r candidate boxes (with replacement).
/// A particle already covered by the applied boxes is rejected; after
/// max_rejects consecutive rejections the list is returned short.
void sample_p(const GainTable& table, std::size_t r, Rng& rng,
              std::size_t max_rejects, std::vector<BoxIndex>& out,
              SampleStats* stats = nullptr,
              BoxSampling mode = BoxSampling::proportional);

std::vector<BoxIndex> sample_p(const GainTable& table, std::size_t r, Rng& rng,
                               std::size_t max_rejects);

/// Greedy maximization of particle coverage over all boxes (GM+PCF).
Selection greedy_max(std::span<const State> belief, std::size_t k,
                     GainTable& table);
Selection greedy_max(std::span<const State> belief, const TileCoding& coder,
                     std::size_t k);

/// Stochastic greedy (SGM+PCF): argmax over a uniform r-subset of the
/// unselected boxes each iteration.
Selection stochastic_greedy_max(std::span<const State> belief,
                                const SelectorParams& params, GainTable& table);
Selection stochastic_greedy_max(std::span<const State> belief,
                                const TileCoding& coder,
                                const SelectorParams& params);

/// PartiMax: argmax over candidates drawn by sample_p each iteration.
Selection partimax(std::span<const State> belief, const SelectorParams& params,
                   GainTable& table,
                   BoxSampling mode = BoxSampling::proportional);
Selection partimax(std::span<const State> belief, const TileCoding& coder,
                   const SelectorParams& params);

/// Largest enumeration exhaust_max accepts.
inline constexpr std::uint64_t kMaxEnumeration = 10'000'000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Exact optimum of pcf over all k-subsets. Ties resolve to the
/// lexicographically smallest subset. Parallel over the first chosen box;
/// throws std::invalid_argument above kMaxEnumeration subsets.
Selection exhaust_max(std::span<const State> belief, const TileCoding& coder,
                      std::size_t k);
/// Single-threaded reference for exhaust_max.
Selection exhaust_max_serial(std::span<const State> belief,
                             const TileCoding& coder, std::size_t k);

using Rational = boost::multiprecision::cpp_rational;

/// Largest selection expected_coverage accepts (2^16 binary patterns).
inline constexpr std::size_t kMaxCoverageBoxes = 16;

/// Expected coverage: sum over binary detection patterns z of
/// Pr(z | belief, A) times the coverage of A under the posterior belief,
/// where the posterior reweights the m particles by Pr(z | particle) and
/// keeps total mass m. Exact rational arithmetic.
Rational expected_coverage(std::span<const State> belief,
                           std::span<const BoxIndex> boxes,
                           const DetectorModel& detector,
                           const TileCoding& coder);

/// Generic best-of-r sampling: draws r indices with probability proportional
/// to `values` (with replacement) and returns the largest drawn value.
double best_of_proportional_sample(std::span<const double> values,
                                   std::size_t r, Rng& rng);

/// Names accepted on the command line and written to the benchmark table.
enum class Algorithm { greedy, sgm, partimax, brute };
std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

}  // namespace partimax
