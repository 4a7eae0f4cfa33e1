#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "partimax/belief.hpp"

using namespace partimax;

namespace {

const TileCoding& full_coder() {
  static const TileCoding coder({5120, 3840, 180, 180, 60, 30});
  return coder;
}

// Detect pattern of a particle over the selection under a noiseless detector.
std::vector<bool> pattern(const TileCoding& coder, const State& s,
                          const std::vector<BoxIndex>& boxes) {
  std::vector<bool> out;
  for (BoxIndex b : boxes) out.push_back(coder.contains(b, s.x, s.y));
  return out;
}

}  // namespace

TEST_CASE("noiseless prediction drifts by the velocity") {
  Rng rng(1);
  ParticleBelief b({{10, 10, 2, 3}});
  b = predict(std::move(b), {0.0, 0.0}, full_coder(), rng);
  CHECK(b[0] == State{12, 13, 2, 3});
}

TEST_CASE("prediction clamps to the plane edge") {
  Rng rng(1);
  ParticleBelief b({{5119, 100, 100, 0}});
  b = predict(std::move(b), {0.0, 0.0}, full_coder(), rng);
  CHECK(b[0].x == 5120);
  CHECK(b[0].vx == 100);
}

TEST_CASE("prediction noise has the configured moments") {
  Rng rng(42);
  constexpr int kSamples = 100'000;
  std::vector<State> ps(kSamples, State{2000, 2000, 0, 0});
  const ParticleBelief moved = predict(ParticleBelief(ps), {5.0, 5.0}, full_coder(), rng);
  double mean = 0, sq = 0;
  for (const State& s : moved.particles()) {
    mean += s.x - 2000;
    sq += (s.x - 2000) * (s.x - 2000);
  }
  mean /= kSamples;
  const double sd = std::sqrt(sq / kSamples - mean * mean);
  // 3 standard errors: 3 * 5 / sqrt(1e5) = 0.047 for the mean,
  // 3 * 5 / sqrt(2e5) = 0.034 for the std.dev.
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(sd - 5.0) < 0.05);
  CHECK(moved.size() == kSamples);
}

TEST_CASE("empty beliefs are rejected") {
  CHECK_THROWS(ParticleBelief(std::vector<State>{}));
}

TEST_CASE("perfect detector observes coverage exactly") {
  const TileCoding& coder = full_coder();
  Rng rng(3);
  const State person{1000, 1000, 0, 0};
  const BoxIndex with = coder.cover_in_tiling(1000, 1000, 0);
  const BoxIndex without = coder.cover_in_tiling(3000, 3000, 0);
  const std::vector<BoxIndex> sel{with, without};
  for (int i = 0; i < 200; ++i) {
    const Observation z = simulate_observation({&person, 1}, sel, DetectorModel::perfect(), coder, rng);
    REQUIRE(z.entries.size() == 2);
    CHECK(z.entries[0].detected);
    CHECK(z.entries[0].x == 1000);  // loc_noise = 0
    CHECK(z.entries[0].y == 1000);
    CHECK_FALSE(z.entries[1].detected);
  }
}

TEST_CASE("detection rate matches p_detect") {
  const TileCoding& coder = full_coder();
  Rng rng(5);
  const State person{1000, 1000, 0, 0};
  const std::vector<BoxIndex> sel{coder.cover_in_tiling(1000, 1000, 2)};
  int hits = 0;
  constexpr int kTrials = 10'000;
  for (int i = 0; i < kTrials; ++i)
    hits += simulate_observation({&person, 1}, sel, DetectorModel{}, coder, rng).entries[0].detected;
  CHECK(std::abs(hits / double(kTrials) - 0.9) < 0.01);
}

TEST_CASE("false positives report a location inside the box") {
  const TileCoding& coder = full_coder();
  Rng rng(9);
  const State person{10, 10, 0, 0};
  const BoxIndex empty_box = coder.cover_in_tiling(2500, 2500, 3);
  DetectorModel noisy{0.9, 0.5, 15.0};
  int fp = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto z = simulate_observation({&person, 1}, std::vector<BoxIndex>{empty_box}, noisy, coder, rng);
    if (!z.entries[0].detected) continue;
    ++fp;
    CHECK(coder.contains(empty_box, z.entries[0].x, z.entries[0].y));
  }
  CHECK(fp > 400);
  CHECK(fp < 600);
}

TEST_CASE("noiseless update keeps exactly the particles matching the pattern") {
  const TileCoding& coder = full_coder();
  Rng rng(11);
  std::vector<State> ps;
  std::uniform_real_distribution<double> u(800, 1400);
  for (int i = 0; i < 250; ++i) ps.push_back({u(rng), u(rng), 0, 0});
  const ParticleBelief belief(ps);
  const State person{1000, 1000, 0, 0};
  const std::vector<BoxIndex> sel{coder.cover_in_tiling(1000, 1000, 0),
                                  coder.cover_in_tiling(1300, 1300, 1)};
  const Observation z = simulate_observation({&person, 1}, sel, DetectorModel::perfect(), coder, rng);
  const auto target = pattern(coder, person, sel);

  FilterParams filter;
  filter.inject_fraction = 0.05;
  const UpdateResult up = update(belief, sel, z, DetectorModel::perfect(), filter, coder, rng);

  std::vector<std::uint32_t> matching;
  for (std::uint32_t i = 0; i < ps.size(); ++i)
    if (pattern(coder, ps[i], sel) == target) matching.push_back(i);
  CHECK(up.survivor_indices == matching);
  CHECK(up.belief.size() == 250);
  CHECK(up.injected >= 12);
  // Resampled particles come first; all of them lie in the detecting box.
  for (std::size_t i = 0; i < 250 - up.injected; ++i)
    CHECK(coder.contains(sel[0], up.belief[i].x, up.belief[i].y));
}

TEST_CASE("noiseless all-negative update removes particles inside the selection") {
  const TileCoding& coder = full_coder();
  Rng rng(12);
  const ParticleBelief belief = ParticleBelief::uniform(coder, 250, 10, rng);
  std::vector<BoxIndex> sel;
  for (BoxIndex b = 0; b < 200; ++b) sel.push_back(b);
  Observation z;
  for (BoxIndex b : sel) z.entries.push_back({b, false, 0, 0});
  FilterParams filter;
  filter.inject_fraction = 0;
  const UpdateResult up = update(belief, sel, z, DetectorModel::perfect(), filter, coder, rng);
  REQUIRE_FALSE(up.degenerate);
  for (const State& s : up.belief.particles())
    for (BoxIndex b : sel) CHECK_FALSE(coder.contains(b, s.x, s.y));
}

TEST_CASE("impossible observation injects the whole belief") {
  const TileCoding& coder = full_coder();
  Rng rng(13);
  const ParticleBelief belief({{100, 100, 0, 0}, {120, 90, 0, 0}});
  const BoxIndex far_box = coder.cover_in_tiling(4000, 3000, 0);
  Observation z;
  z.entries.push_back({far_box, true, 4000, 3000});
  FilterParams filter;
  filter.particles = 2;
  const UpdateResult up =
      update(belief, std::vector<BoxIndex>{far_box}, z, DetectorModel::perfect(), filter, coder, rng);
  CHECK(up.degenerate);
  CHECK(up.survivors == 0);
  CHECK(up.injected == 2);
  for (const State& s : up.belief.particles()) {
    CHECK(s.x == 4000);  // loc_noise = 0 injects at the report
    CHECK(s.y == 3000);
  }
}

TEST_CASE("update conserves size and is seed-deterministic under noise") {
  const TileCoding& coder = full_coder();
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    ParticleBelief belief = ParticleBelief::uniform(coder, 250, 10, rng);
    const State person{2500, 1800, 3, -2};
    std::vector<BoxIndex> sel;
    for (BoxIndex b = 0; b < 655; b += 5) sel.push_back(b);
    sel.push_back(coder.cover_in_tiling(person.x, person.y, 0));
    for (int step = 0; step < 10; ++step) {
      belief = predict(std::move(belief), {4, 4}, coder, rng);
      const auto z = simulate_observation({&person, 1}, sel, DetectorModel{}, coder, rng);
      belief = update(belief, sel, z, DetectorModel{}, FilterParams{}, coder, rng).belief;
      CHECK(belief.size() == 250);
    }
    return belief;
  };
  CHECK(run(77) == run(77));
  CHECK_FALSE(run(77) == run(78));
}

TEST_CASE("validation of model parameters") {
  CHECK_THROWS(validate(DetectorModel{0.5, 0.5, 1}));
  CHECK_THROWS(validate(DetectorModel{1.1, 0.0, 1}));
  CHECK_THROWS(validate(DetectorModel{0.9, 0.0, -1}));
  CHECK_NOTHROW(validate(DetectorModel::perfect()));
  CHECK_THROWS(validate(MotionModel{-1, 1}));
  FilterParams f;
  f.inject_fraction = 1.5;
  CHECK_THROWS(validate(f));
}

TEST_CASE("bounded draws stay in range and are flat") {
  Rng rng(31);
  HalfWordSource bits(rng);
  constexpr std::uint32_t kBins = 7;
  constexpr int kDraws = 70000;
  std::vector<int> half(kBins, 0), full(kBins, 0);
  for (int i = 0; i < kDraws; ++i) {
    const std::uint32_t a = bits.below(kBins);
    const std::uint64_t b = uniform_below(rng, kBins);
    REQUIRE(a < kBins);
    REQUIRE(b < kBins);
    ++half[a];
    ++full[b];
  }
  for (std::uint32_t v = 0; v < kBins; ++v) {
    // 10000 expected per bin; sd ~93.
    CHECK(std::abs(half[v] - 10000) < 500);
    CHECK(std::abs(full[v] - 10000) < 500);
  }
  CHECK(bits.below(1) == 0);
  CHECK(uniform_below(rng, 1) == 0);
}
