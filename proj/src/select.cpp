#include "partimax/select.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace partimax {

void validate(const SelectorParams& p, std::size_t box_count) {
  if (p.k < 1 || p.k > box_count)
    throw std::invalid_argument("selector needs 1 <= k <= n (k=" +
                                std::to_string(p.k) + ", n=" +
                                std::to_string(box_count) + ")");
  if (p.r < 1) throw std::invalid_argument("selector needs r >= 1");
  if (p.effective_max_rejects() < p.r)
    throw std::invalid_argument("selector needs max_rejects >= r");
}

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

std::size_t covered_count(const GainTable& table) {
  return table.particle_count() - table.uncovered();
}

// Lowest index whose flag is clear.
BoxIndex lowest_unselected(const std::vector<char>& selected) {
  auto it = std::find(selected.begin(), selected.end(), 0);
  return static_cast<BoxIndex>(std::distance(selected.begin(), it));
}

// Argmax of gain over candidates, ties to the lowest index.
BoxIndex best_candidate(const GainTable& table, std::span<const BoxIndex> candidates) {
  BoxIndex best = candidates.front();
  std::int32_t best_gain = table.gain(best);
  for (BoxIndex b : candidates.subspan(1)) {
    const std::int32_t g = table.gain(b);
    if (g > best_gain || (g == best_gain && b < best)) {
      best = b;
      best_gain = g;
    }
  }
  return best;
}

}  // namespace

void sample_p(const GainTable& table, std::size_t r, Rng& rng,
              std::size_t max_rejects, std::vector<BoxIndex>& out,
              SampleStats* stats, BoxSampling mode) {
  out.clear();
  const std::size_t m = table.particle_count();
  if (m == 0 || r == 0) return;
  const auto t = static_cast<std::uint32_t>(table.tilings());
  const auto n = static_cast<std::uint32_t>(table.box_count());
  const auto particles = static_cast<std::uint32_t>(m);
  HalfWordSource bits(rng);
  std::size_t consecutive = 0;
  SampleStats local;
  while (out.size() < r) {
    const std::uint32_t p = bits.below(particles);
    ++local.draws;
    if (table.covered(p)) {
      ++local.rejected;
      if (++consecutive >= max_rejects) break;
      continue;
    }
    consecutive = 0;
    if (mode == BoxSampling::proportional)
      out.push_back(table.cover_of(p, bits.below(t)));
    else
      out.push_back(static_cast<BoxIndex>(bits.below(n)));
  }
  if (stats) {
    stats->draws += local.draws;
    stats->rejected += local.rejected;
  }
}

std::vector<BoxIndex> sample_p(const GainTable& table, std::size_t r, Rng& rng,
                               std::size_t max_rejects) {
  std::vector<BoxIndex> out;
  sample_p(table, r, rng, max_rejects, out);
  return out;
}

Selection greedy_max(std::span<const State> belief, std::size_t k,
                     GainTable& table) {
  const auto start = Clock::now();
  const std::size_t n = table.box_count();
  if (k > n) throw std::invalid_argument("greedy_max needs k <= n");
  Selection sel;
  sel.boxes.reserve(k);
  table.initialize(belief);
  std::vector<char> selected(n, 0);
  const std::int32_t* gains = table.gains().data();
  for (std::size_t l = 0; l < k; ++l) {
    BoxIndex best = 0;
    std::int32_t best_gain = gains[0];
    for (std::size_t i = 1; i < n; ++i) {
      if (gains[i] > best_gain) {
        best_gain = gains[i];
        best = static_cast<BoxIndex>(i);
      }
    }
    sel.gain_evaluations += n - l;
    if (best_gain <= 0) best = lowest_unselected(selected);
    selected[best] = 1;
    sel.boxes.push_back(best);
    table.apply(best);
  }
  sel.utility = covered_count(table);
  sel.elapsed_us = micros_since(start);
  return sel;
}

Selection greedy_max(std::span<const State> belief, const TileCoding& coder,
                     std::size_t k) {
  GainTable table(coder);
  return greedy_max(belief, k, table);
}

Selection stochastic_greedy_max(std::span<const State> belief,
                                const SelectorParams& params, GainTable& table) {
  const auto start = Clock::now();
  const std::size_t n = table.box_count();
  validate(params, n);
  Rng rng(params.seed);
  Selection sel;
  sel.boxes.reserve(params.k);
  table.initialize(belief);
  std::vector<char> selected(n, 0);
  std::vector<BoxIndex> candidates;
  std::vector<BoxIndex> pool;

  for (std::size_t l = 0; l < params.k; ++l) {
    const std::size_t remaining = n - l;
    candidates.clear();
    if (params.r >= remaining) {
      for (std::size_t i = 0; i < n; ++i)
        if (!selected[i]) candidates.push_back(static_cast<BoxIndex>(i));
    } else if (2 * params.r <= remaining) {
      // Sparse draw: rejection against selected boxes and earlier candidates.
      while (candidates.size() < params.r) {
        const auto b = static_cast<BoxIndex>(uniform_below(rng, n));
        if (selected[b] ||
            std::find(candidates.begin(), candidates.end(), b) != candidates.end())
          continue;
        candidates.push_back(b);
      }
    } else {
      pool.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (!selected[i]) pool.push_back(static_cast<BoxIndex>(i));
      for (std::size_t i = 0; i < params.r; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
        candidates.push_back(pool[i]);
      }
    }
    sel.gain_evaluations += candidates.size();
    const BoxIndex best = best_candidate(table, candidates);
    selected[best] = 1;
    sel.boxes.push_back(best);
    table.apply(best);
  }
  sel.utility = covered_count(table);
  sel.elapsed_us = micros_since(start);
  return sel;
}

Selection stochastic_greedy_max(std::span<const State> belief,
                                const TileCoding& coder,
                                const SelectorParams& params) {
  GainTable table(coder);
  return stochastic_greedy_max(belief, params, table);
}

Selection partimax(std::span<const State> belief, const SelectorParams& params,
                   GainTable& table, BoxSampling mode) {
  const auto start = Clock::now();
  validate(params, table.box_count());
  Rng rng(params.seed);
  Selection sel;
  sel.boxes.reserve(params.k);
  table.initialize(belief);
  std::vector<BoxIndex> candidates;
  candidates.reserve(params.r);
  SampleStats stats;
  const std::size_t max_rejects = params.effective_max_rejects();

  auto is_selected = [&](BoxIndex b) {
    return std::find(sel.boxes.begin(), sel.boxes.end(), b) != sel.boxes.end();
  };

  BoxIndex fallback = 0;
  bool exhausted = false;
  for (std::size_t l = 0; l < params.k; ++l) {
    // Once a sample comes back empty, every remaining pick is a fallback.
    candidates.clear();
    if (!exhausted && table.uncovered() > 0)
      sample_p(table, params.r, rng, max_rejects, candidates, &stats, mode);
    exhausted = exhausted || candidates.empty();
    if (mode != BoxSampling::proportional)
      std::erase_if(candidates, is_selected);
    BoxIndex pick;
    if (candidates.empty()) {
      // The lowest unselected index only grows as the selection does.
      while (is_selected(fallback)) ++fallback;
      pick = fallback;
    } else {
      sel.gain_evaluations += candidates.size();
      pick = best_candidate(table, candidates);
    }
    sel.boxes.push_back(pick);
    table.apply(pick);
  }
  sel.sample_draws = stats.draws;
  sel.rejected_draws = stats.rejected;
  sel.utility = covered_count(table);
  sel.elapsed_us = micros_since(start);
  return sel;
}

Selection partimax(std::span<const State> belief, const TileCoding& coder,
                   const SelectorParams& params) {
  GainTable table(coder);
  return partimax(belief, params, table);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max())
      return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

namespace {

// Particle-membership bitmask of every box.
struct CoverageMasks {
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;  // n x words

  CoverageMasks(std::span<const State> belief, const TileCoding& coder)
      : words((belief.size() + 63) / 64),
        bits(coder.box_count() * words, 0) {
    std::vector<BoxIndex> cover(coder.tilings());
    for (std::size_t p = 0; p < belief.size(); ++p) {
      coder.covers(belief[p].x, belief[p].y, cover);
      for (BoxIndex b : cover) bits[b * words + p / 64] |= std::uint64_t{1} << (p % 64);
    }
  }
  const std::uint64_t* of(std::size_t box) const { return bits.data() + box * words; }
};

struct Best {
  std::size_t utility = 0;
  std::vector<BoxIndex> boxes;
  bool found = false;
};

// Lexicographic enumeration of the k-subsets whose first element is `first`.
// Strict improvement keeps the lexicographically smallest optimum.
void enumerate_from(const CoverageMasks& masks, std::size_t n, std::size_t k,
                    BoxIndex first, Best& best) {
  const std::size_t w = masks.words;
  std::vector<std::uint64_t> unions(k * w, 0);
  std::vector<BoxIndex> chosen(k);
  chosen[0] = first;
  std::copy_n(masks.of(first), w, unions.begin());

  auto score = [&](std::size_t depth) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < w; ++i) c += std::popcount(unions[depth * w + i]);
    return c;
  };
  auto consider = [&]() {
    const std::size_t u = score(k - 1);
    if (!best.found || u > best.utility) {
      best.found = true;
      best.utility = u;
      best.boxes = chosen;
    }
  };
  if (k == 1) {
    consider();
    return;
  }
  // Iterative odometer over positions 1..k-1.
  std::size_t depth = 1;
  chosen[1] = first;  // incremented before use
  while (depth >= 1) {
    ++chosen[depth];
    if (chosen[depth] > n - (k - depth)) {
      --depth;
      continue;
    }
    const std::uint64_t* m = masks.of(chosen[depth]);
    for (std::size_t i = 0; i < w; ++i)
      unions[depth * w + i] = unions[(depth - 1) * w + i] | m[i];
    if (depth + 1 == k) {
      consider();
    } else {
      chosen[depth + 1] = chosen[depth];
      ++depth;
    }
  }
}

void check_enumeration(std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("exhaust_max needs k <= n");
  if (binomial(n, k) > kMaxEnumeration)
    throw std::invalid_argument("exhaust_max: C(" + std::to_string(n) + ", " +
                                std::to_string(k) + ") exceeds the enumeration guard");
}

Selection to_selection(const Best& best, std::size_t evaluations) {
  Selection sel;
  sel.boxes = best.boxes;
  sel.utility = best.utility;
  sel.gain_evaluations = evaluations;
  return sel;
}

}  // namespace

Selection exhaust_max_serial(std::span<const State> belief,
                             const TileCoding& coder, std::size_t k) {
  const std::size_t n = coder.box_count();
  check_enumeration(n, k);
  if (k == 0) return {};
  const CoverageMasks masks(belief, coder);
  Best best;
  for (std::size_t first = 0; first + k <= n; ++first)
    enumerate_from(masks, n, k, static_cast<BoxIndex>(first), best);
  return to_selection(best, binomial(n, k));
}

Selection exhaust_max(std::span<const State> belief, const TileCoding& coder,
                      std::size_t k) {
  const std::size_t n = coder.box_count();
  check_enumeration(n, k);
  if (k == 0) return {};
  const CoverageMasks masks(belief, coder);
  const std::size_t firsts = n - k + 1;
  std::vector<Best> per_first(firsts);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t f = 0; f < static_cast<std::ptrdiff_t>(firsts); ++f)
    enumerate_from(masks, n, k, static_cast<BoxIndex>(f), per_first[f]);
  Best best;
  for (const Best& b : per_first)
    if (!best.found || b.utility > best.utility) best = b;
  return to_selection(best, binomial(n, k));
}

Rational expected_coverage(std::span<const State> belief,
                           std::span<const BoxIndex> boxes,
                           const DetectorModel& detector,
                           const TileCoding& coder) {
  const std::size_t a = boxes.size();
  if (a > kMaxCoverageBoxes)
    throw std::invalid_argument("expected_coverage: selection too large to enumerate");
  if (a == 0) return Rational(0);

  // Particles grouped by which selected boxes contain them; the likelihood of
  // a pattern depends only on that signature.
  std::map<std::uint32_t, std::size_t> signatures;
  for (const State& s : belief) {
    std::uint32_t sig = 0;
    for (std::size_t b = 0; b < a; ++b)
      if (coder.contains(boxes[b], s.x, s.y)) sig |= 1u << b;
    ++signatures[sig];
  }

  const Rational pd(detector.p_detect);
  const Rational pf(detector.p_false);
  const Rational one(1);
  const Rational m(static_cast<long long>(belief.size()));

  Rational total(0);
  for (std::uint32_t z = 0; z < (1u << a); ++z) {
    Rational evidence(0);  // sum over particles of Pr(z | particle)
    Rational covered(0);   // same, restricted to particles covered by A
    for (const auto& [sig, count] : signatures) {
      Rational lik(1);
      for (std::size_t b = 0; b < a; ++b) {
        const bool inside = (sig >> b) & 1u;
        const bool detected = (z >> b) & 1u;
        if (inside)
          lik *= detected ? pd : one - pd;
        else
          lik *= detected ? pf : one - pf;
      }
      lik *= static_cast<long long>(count);
      evidence += lik;
      if (sig != 0) covered += lik;
    }
    if (evidence == 0) continue;
    const Rational pr_z = evidence / m;
    const Rational posterior_coverage = m * covered / evidence;
    total += pr_z * posterior_coverage;
  }
  return total;
}

double best_of_proportional_sample(std::span<const double> values,
                                   std::size_t r, Rng& rng) {
  std::discrete_distribution<std::size_t> dist(values.begin(), values.end());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r; ++i) best = std::max(best, values[dist(rng)]);
  return best;
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::greedy: return "greedy";
    case Algorithm::sgm: return "sgm";
    case Algorithm::partimax: return "partimax";
    case Algorithm::brute: return "brute";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::greedy, Algorithm::sgm, Algorithm::partimax,
                      Algorithm::brute})
    if (to_string(a) == name) return a;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

}  // namespace partimax
