#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "partimax/belief.hpp"
#include "partimax/select.hpp"
#include "partimax/tiling.hpp"

namespace partimax {

struct Trajectory {
  int person_id = 0;
  std::vector<State> states;
};

/// One step of the ground-truth walk: constant velocity plus positional
/// noise, reflecting position and velocity off the plane edges.
State step_true_state(const State& s, const MotionModel& motion,
                      const TileCoding& coder, Rng& rng);

Trajectory gen_trajectory_from(const State& start, std::size_t steps,
                               const MotionModel& motion,
                               const TileCoding& coder, Rng& rng,
                               int person_id = 0);

/// Start uniform in the plane, velocity uniform in [-v_max, v_max]^2.
Trajectory gen_trajectory(Rng& rng, std::size_t steps, const MotionModel& motion,
                          const TileCoding& coder, double v_max,
                          int person_id = 0);

/// Which selector runs each frame. k = 0 disables detection entirely;
/// `brute` ignores k and r and applies the detector to every box of
/// tiling 0.
struct SelectorSpec {
  Algorithm algorithm = Algorithm::partimax;
  std::size_t k = 40;
  std::size_t r = 10;
  std::size_t max_rejects = 0;
};

struct EpisodeConfig {
  MotionModel motion;
  DetectorModel detector;
  FilterParams filter;
  double time_budget_us = 0;  // 0: no budget
};

struct EpisodeResult {
  double correct_predictions = 0;  // summed over timesteps, mean over people
  std::size_t timesteps = 0;
  std::size_t people = 0;
  std::vector<double> selection_time_us;  // one per frame
  std::uint64_t gain_evaluations = 0;
  std::uint64_t sample_draws = 0;
  std::size_t boxes_per_frame = 0;    // detector applications per frame
  double boxes_fraction = 0;          // boxes_per_frame / n
  std::size_t budget_overruns = 0;
  std::size_t degenerate_updates = 0;

  double mean_selection_time_us() const;
};

/// Box with the largest particle count in `belief`, ties to the lowest index.
BoxIndex mode_box(const ParticleBelief& belief, const TileCoding& coder);

/// Tracks everyone in `trajectories` (all the same length) for one episode.
/// Each frame: predict every belief, select boxes on the pooled particles,
/// observe the true states, update every belief, then score each person +1
/// when their true position lies in their belief's mode box.
EpisodeResult run_episode(std::span<const Trajectory> trajectories,
                          const SelectorSpec& selector,
                          const EpisodeConfig& config, const TileCoding& coder,
                          Rng& rng);

struct BenchmarkConfig {
  TileCodingConfig geometry;
  EpisodeConfig episode;
  std::vector<Algorithm> algorithms;
  std::vector<std::size_t> k_values{40};
  std::vector<std::size_t> r_values{10};
  std::vector<std::size_t> people{1};
  std::vector<std::uint64_t> seeds{1};
  std::size_t trajectories = 1;
  std::size_t timesteps = 50;
  std::size_t max_rejects = 0;
  int jobs = 1;
};

struct BenchmarkRow {
  Algorithm algorithm = Algorithm::partimax;
  std::size_t k = 0;
  std::size_t r = 0;
  std::size_t people = 0;
  std::uint64_t seed = 0;
  std::size_t trajectory_id = 0;
  EpisodeResult result;
  std::optional<std::string> error;  // set when the episode threw
};

/// Sweep algorithms x k x r x people x seeds x trajectories. Rows come back in
/// sweep order regardless of `jobs`. Trajectories depend only on
/// (seed, people, trajectory_id), so every algorithm sees the same walks.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config);

/// Seed derived from a list of integers.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace partimax
