#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "partimax/belief.hpp"
#include "partimax/select.hpp"
#include "partimax/simulate.hpp"
#include "partimax/tiling.hpp"

namespace partimax {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything the command-line tool needs. Stored on disk as INI text:
///
///   [run]       mode, seed, out
///   [geometry]  image_width, image_height, box_width, box_height,
///               offset_x, offset_y
///   [motion]    sigma_x, sigma_y
///   [detector]  p_detect, p_false, loc_noise
///   [filter]    particles, inject_fraction, v_max
///   [selector]  max_rejects, time_budget_us
///   [sweep]     algorithms, k, r, people, seeds, trajectories, timesteps
///   [bench]     record_timing, jobs
///   [select]    algorithm, k, r
///
/// Lists are comma-separated. Unknown sections or keys are errors.
struct RunConfig {
  std::string mode = "bench";
  std::uint64_t seed = 1;
  std::string out = "results.csv";

  TileCodingConfig geometry;
  MotionModel motion;
  DetectorModel detector;
  FilterParams filter;

  std::size_t max_rejects = 0;
  double time_budget_us = 0;

  std::vector<Algorithm> algorithms{Algorithm::greedy, Algorithm::sgm,
                                    Algorithm::partimax, Algorithm::brute};
  std::vector<std::size_t> k_values{40};
  std::vector<std::size_t> r_values{10};
  std::vector<std::size_t> people{1, 3, 5};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6};
  std::size_t trajectories = 1;
  std::size_t timesteps = 50;

  bool record_timing = true;
  int jobs = 1;

  Algorithm select_algorithm = Algorithm::partimax;
  std::size_t select_k = 40;
  std::size_t select_r = 10;

  bool operator==(const RunConfig&) const = default;

  BenchmarkConfig benchmark() const;
};

/// Parses INI text; throws ConfigError on syntax errors, unknown keys, bad
/// values or values that break a module invariant.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);

/// Writes every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

void validate(const RunConfig& config);

}  // namespace partimax
