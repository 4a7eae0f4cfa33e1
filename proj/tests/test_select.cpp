#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <vector>

#include "doctest.h"
#include "partimax/select.hpp"
#include "partimax/simulate.hpp"
#include "partimax/verify.hpp"
#include "test_oracles.hpp"

using namespace partimax;
using partimax::testing::brute_optimum;
using partimax::testing::scan_pcf;

namespace {

const TileCoding& grid12() {
  static const TileCoding coder({399, 299, 100, 100, 100, 100});
  return coder;
}

const TileCoding& overlap20() {
  static const TileCoding coder(small_overlapping_geometry());
  return coder;
}

const TileCoding& medium() {
  static const TileCoding coder({1000, 700, 180, 180, 60, 30});
  return coder;
}

bool distinct(std::vector<BoxIndex> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) == v.end();
}

}  // namespace

TEST_CASE("greedy picks the box holding everything") {
  const std::vector<State> ps(25, State{150, 150, 0, 0});
  const auto sel = greedy_max(ps, grid12(), 1);
  REQUIRE(sel.boxes.size() == 1);
  CHECK(grid12().contains(sel.boxes[0], 150, 150));
  CHECK(sel.utility == 25);
}

TEST_CASE("greedy takes the bigger cluster first") {
  std::vector<State> ps(10, State{50, 50, 0, 0});
  ps.insert(ps.end(), 20, State{250, 150, 0, 0});
  const auto sel = greedy_max(ps, grid12(), 2);
  CHECK(sel.utility == 30);
  CHECK(grid12().contains(sel.boxes[0], 250, 150));
  CHECK(scan_pcf(grid12(), ps, sel.boxes) == 30);
}

TEST_CASE("greedy meets 1-1/e of the optimum on a 12-box grid") {
  REQUIRE(grid12().box_count() == 12);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto ps = clustered_particles(grid12(), 30, rng);
    const auto g = greedy_max(ps, grid12(), 3);
    const auto best = brute_optimum(grid12(), ps, 3);
    CHECK(exhaust_max(ps, grid12(), 3).utility == best);
    CHECK(g.utility <= best);
    CHECK(static_cast<double>(g.utility) >= (1 - 1 / std::numbers::e) * best);
  }
}

TEST_CASE("greedy fills with lowest-index boxes once gains run out") {
  const std::vector<State> ps{{250, 150, 0, 0}};
  const auto sel = greedy_max(ps, grid12(), 4);
  REQUIRE(sel.boxes.size() == 4);
  CHECK(grid12().contains(sel.boxes[0], 250, 150));
  std::vector<BoxIndex> rest(sel.boxes.begin() + 1, sel.boxes.end());
  std::vector<BoxIndex> expected;
  for (BoxIndex b = 0; expected.size() < 3; ++b)
    if (b != sel.boxes[0]) expected.push_back(b);
  CHECK(rest == expected);
  CHECK(sel.utility == 1);
}

TEST_CASE("greedy evaluates every unselected box each iteration") {
  Rng rng(1);
  const auto ps = clustered_particles(medium(), 50, rng);
  const std::size_t n = medium().box_count();
  const auto sel = greedy_max(ps, medium(), 5);
  CHECK(sel.gain_evaluations == 5 * n - (0 + 1 + 2 + 3 + 4));
}

TEST_CASE("stochastic greedy with r = n reproduces greedy box for box") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto ps = clustered_particles(medium(), 80, rng);
    SelectorParams params{6, medium().box_count(), seed, 0};
    CHECK(stochastic_greedy_max(ps, medium(), params).boxes == greedy_max(ps, medium(), 6).boxes);
  }
}

TEST_CASE("stochastic greedy with r = 1 picks uniformly among unselected boxes") {
  Rng rng(2);
  const auto ps = clustered_particles(overlap20(), 30, rng);
  const std::size_t n = overlap20().box_count();
  std::vector<double> counts(n, 0.0);
  constexpr int kRuns = 20'000;
  GainTable table(overlap20());
  for (int s = 0; s < kRuns; ++s) {
    SelectorParams params{2, 1, static_cast<std::uint64_t>(s), 0};
    const auto sel = stochastic_greedy_max(ps, params, table);
    CHECK(sel.boxes[0] != sel.boxes[1]);
    counts[sel.boxes[0]] += 1.0 / kRuns;
  }
  const std::vector<double> uniform(n, 1.0 / n);
  CHECK(total_variation(counts, uniform) < 0.02);
}

TEST_CASE("stochastic greedy keeps boxes distinct across sampling regimes") {
  Rng rng(3);
  const auto ps = clustered_particles(overlap20(), 30, rng);
  for (std::size_t r : {1u, 5u, 9u, 12u, 19u, 20u}) {
    SelectorParams params{10, r, 99, 0};
    const auto sel = stochastic_greedy_max(ps, overlap20(), params);
    CHECK(sel.boxes.size() == 10);
    CHECK(distinct(sel.boxes));
    CHECK(sel.utility == scan_pcf(overlap20(), ps, sel.boxes));
  }
}

TEST_CASE("sample_p on a lone particle is uniform over its t boxes") {
  GainTable table(medium());
  const std::vector<State> ps{{400, 300, 0, 0}};
  table.initialize(ps);
  const auto boxes = medium().covers(400, 300);
  Rng rng(4);
  std::map<BoxIndex, double> freq;
  constexpr int kDraws = 100'000;
  std::vector<BoxIndex> out;
  for (int i = 0; i < kDraws; ++i) {
    sample_p(table, 1, rng, 50, out);
    REQUIRE(out.size() == 1);
    freq[out[0]] += 1.0 / kDraws;
  }
  REQUIRE(freq.size() == 6);
  double tv = 0;
  for (BoxIndex b : boxes) tv += std::abs(freq[b] - 1.0 / 6);
  CHECK(tv / 2 < 0.02);
}

TEST_CASE("sample_p returns short when every particle is covered") {
  GainTable table(medium());
  const std::vector<State> ps(12, State{400, 300, 0, 0});
  table.initialize(ps);
  table.apply(medium().cover_in_tiling(400, 300, 0));
  REQUIRE(table.uncovered() == 0);
  Rng rng(5);
  std::vector<BoxIndex> out;
  SampleStats stats;
  sample_p(table, 10, rng, 500, out, &stats);
  CHECK(out.empty());
  CHECK(stats.draws == 500);
  CHECK(stats.rejected == 500);
}

TEST_CASE("sample_p is proportional to gains before and after selections") {
  Rng rng(6);
  const auto ps = clustered_particles(medium(), 20, rng);
  GainTable table(medium());
  table.initialize(ps);
  auto distance = [&]() {
    const std::size_t n = medium().box_count();
    std::vector<double> emp(n, 0.0), ref(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      ref[i] = table.gain(static_cast<BoxIndex>(i)) / double(6 * table.uncovered());
    std::vector<BoxIndex> out;
    constexpr int kDraws = 100'000;
    for (int d = 0; d < kDraws; ++d) {
      sample_p(table, 1, rng, 100'000, out);
      emp[out[0]] += 1.0 / kDraws;
    }
    return total_variation(emp, ref);
  };
  CHECK(distance() < 0.02);
  const auto picks = greedy_max(ps, medium(), 2).boxes;
  table.apply(picks[0]);
  table.apply(picks[1]);
  if (table.uncovered() > 0) CHECK(distance() < 0.02);
}

TEST_CASE("partimax with one cluster picks a covering box") {
  const std::vector<State> ps(30, State{640, 333, 0, 0});
  const auto sel = partimax::partimax(ps, medium(), SelectorParams{1, 10, 1, 0});
  REQUIRE(sel.boxes.size() == 1);
  CHECK(medium().contains(sel.boxes[0], 640, 333));
  CHECK(sel.utility == 30);
}

TEST_CASE("partimax with r >= n t matches greedy utility") {
  GainTable table(medium());
  const std::size_t r = medium().box_count() * medium().tilings();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto ps = clustered_particles(medium(), 60, rng);
    const auto g = greedy_max(ps, medium(), 5);
    const auto p = partimax::partimax(ps, SelectorParams{5, r, seed, 0}, table);
    CHECK(p.utility == g.utility);
  }
}

TEST_CASE("partimax falls back to lowest unselected boxes once everything is covered") {
  const std::vector<State> ps(8, State{250, 150, 0, 0});
  const auto sel = partimax::partimax(ps, grid12(), SelectorParams{3, 4, 7, 0});
  REQUIRE(sel.boxes.size() == 3);
  CHECK(grid12().contains(sel.boxes[0], 250, 150));
  std::vector<BoxIndex> expected;
  for (BoxIndex b = 0; expected.size() < 2; ++b)
    if (b != sel.boxes[0]) expected.push_back(b);
  CHECK(std::vector<BoxIndex>(sel.boxes.begin() + 1, sel.boxes.end()) == expected);
  CHECK(sel.utility == 8);
}

TEST_CASE("partimax work accounting stays within r per iteration") {
  Rng rng(8);
  const auto ps = clustered_particles(medium(), 100, rng);
  const SelectorParams params{10, 7, 3, 0};
  const auto sel = partimax::partimax(ps, medium(), params);
  CHECK(sel.gain_evaluations <= params.k * params.r);
  CHECK(sel.sample_draws >= sel.gain_evaluations);
  CHECK(sel.sample_draws - sel.rejected_draws == sel.gain_evaluations);
  CHECK(distinct(sel.boxes));
  CHECK(sel.utility == scan_pcf(medium(), ps, sel.boxes));
}

TEST_CASE("selector parameters are validated") {
  const std::vector<State> ps{{1, 1, 0, 0}};
  CHECK_THROWS(partimax::partimax(ps, grid12(), SelectorParams{0, 1, 1, 0}));
  CHECK_THROWS(partimax::partimax(ps, grid12(), SelectorParams{13, 1, 1, 0}));
  CHECK_THROWS(partimax::partimax(ps, grid12(), SelectorParams{1, 0, 1, 0}));
  CHECK_THROWS(partimax::partimax(ps, grid12(), SelectorParams{1, 5, 1, 3}));
  CHECK_THROWS(greedy_max(ps, grid12(), 13));
}

TEST_CASE("exhaustive optimum agrees with the permutation oracle and its serial twin") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Rng rng(seed);
    const auto ps = clustered_particles(overlap20(), 25, rng);
    for (std::size_t k : {1u, 2u, 3u, 4u}) {
      const auto par = exhaust_max(ps, overlap20(), k);
      const auto ser = exhaust_max_serial(ps, overlap20(), k);
      CHECK(par.boxes == ser.boxes);
      CHECK(par.utility == brute_optimum(overlap20(), ps, k));
      CHECK(par.utility == scan_pcf(overlap20(), ps, par.boxes));
    }
  }
}

TEST_CASE("exhaustive optimum with k = n covers every particle") {
  Rng rng(9);
  const auto ps = clustered_particles(grid12(), 40, rng);
  CHECK(exhaust_max(ps, grid12(), 12).utility == 40);
}

TEST_CASE("on disjoint boxes greedy is optimal") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto ps = clustered_particles(grid12(), 35, rng);
    for (std::size_t k : {1u, 2u, 3u, 5u})
      CHECK(greedy_max(ps, grid12(), k).utility == exhaust_max(ps, grid12(), k).utility);
  }
}

TEST_CASE("exhaustive enumeration is guarded") {
  const std::vector<State> ps{{1, 1, 0, 0}};
  CHECK(binomial(20, 4) == 4845);
  CHECK(binomial(3931, 40) == UINT64_MAX);
  CHECK_THROWS(exhaust_max(ps, medium(), 8));
}

TEST_CASE("expected coverage of the empty set is zero") {
  const std::vector<State> ps(5, State{100, 100, 0, 0});
  CHECK(expected_coverage(ps, {}, DetectorModel{}, medium()) == 0);
}

TEST_CASE("expected coverage equals pcf under a noiseless detector") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto m = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    const auto ps = clustered_particles(medium(), m, rng);
    std::vector<BoxIndex> boxes;
    const auto a = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    while (boxes.size() < a) {
      const State& s = ps[std::uniform_int_distribution<std::size_t>(0, m - 1)(rng)];
      const BoxIndex b = medium().cover_in_tiling(s.x + 50, s.y - 40, boxes.size());
      if (std::find(boxes.begin(), boxes.end(), b) == boxes.end()) boxes.push_back(b);
    }
    const auto direct = static_cast<long long>(scan_pcf(medium(), ps, boxes));
    CHECK(expected_coverage(ps, boxes, DetectorModel::perfect(), medium()) == Rational(direct));
    // With posteriors normalised to m particles, the expectation of posterior
    // coverage is the prior coverage for any channel.
    CHECK(expected_coverage(ps, boxes, DetectorModel{0.9, 0.01, 15}, medium()) == Rational(direct));
  }
}

TEST_CASE("expected coverage guards the pattern enumeration") {
  const std::vector<State> ps{{1, 1, 0, 0}};
  std::vector<BoxIndex> boxes(17);
  for (BoxIndex i = 0; i < 17; ++i) boxes[i] = i;
  CHECK_THROWS(expected_coverage(ps, boxes, DetectorModel{}, medium()));
}

TEST_CASE("best-of-r proportional sampling") {
  Rng rng(10);
  const std::vector<double> one{3.5};
  CHECK(best_of_proportional_sample(one, 4, rng) == 3.5);
  const std::vector<double> values{1, 2, 100};
  CHECK(best_of_proportional_sample(values, 200, rng) == 100);
}

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a : {Algorithm::greedy, Algorithm::sgm, Algorithm::partimax, Algorithm::brute})
    CHECK(parse_algorithm(to_string(a)) == a);
  CHECK_THROWS(parse_algorithm("lazy"));
}
