#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "partimax/tiling.hpp"

namespace partimax {

using Rng = std::mt19937_64;

/// Exactly uniform integer in [0, n), n > 0: multiply-shift with rejection
/// of the biased low range (Lemire 2019). Cheaper than
/// std::uniform_int_distribution in the sampling loops.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  unsigned __int128 product = static_cast<unsigned __int128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(product);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(rng()) * n;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

/// Hands out 32-bit halves of 64-bit engine outputs, each exactly uniform,
/// so tight sampling loops call the engine half as often.
class HalfWordSource {
 public:
  explicit HalfWordSource(Rng& rng) : rng_(&rng) {}

  std::uint32_t next() {
    if (have_) {
      have_ = false;
      return static_cast<std::uint32_t>(buffer_ >> 32);
    }
    buffer_ = (*rng_)();
    have_ = true;
    return static_cast<std::uint32_t>(buffer_);
  }

  /// Exactly uniform in [0, n), 0 < n < 2^32.
  std::uint32_t below(std::uint32_t n) {
    std::uint64_t product = static_cast<std::uint64_t>(next()) * n;
    auto low = static_cast<std::uint32_t>(product);
    if (low < n) {
      const std::uint32_t threshold = (0u - n) % n;
      while (low < threshold) {
        product = static_cast<std::uint64_t>(next()) * n;
        low = static_cast<std::uint32_t>(product);
      }
    }
    return static_cast<std::uint32_t>(product >> 32);
  }

 private:
  Rng* rng_;
  std::uint64_t buffer_ = 0;
  bool have_ = false;
};

/// Position and velocity of one person in image coordinates.
struct State {
  double x = 0;
  double y = 0;
  double vx = 0;
  double vy = 0;

  bool operator==(const State&) const = default;
};

/// Constant-velocity motion with Gaussian positional noise.
struct MotionModel {
  double sigma_x = 4.0;
  double sigma_y = 4.0;

  bool operator==(const MotionModel&) const = default;
};

/// Stochastic stand-in for a per-box person detector.
struct DetectorModel {
  double p_detect = 0.9;   // hit rate for a box containing a person
  double p_false = 0.01;   // false-positive rate for an empty box
  double loc_noise = 15.0; // std.dev. of the reported location, pixels

  /// p_detect = 1, p_false = 0: the detector reveals coverage exactly.
  static DetectorModel perfect() { return {1.0, 0.0, 0.0}; }

  bool operator==(const DetectorModel&) const = default;
};

struct FilterParams {
  std::size_t particles = 250;
  double inject_fraction = 0.05;
  double v_max = 10.0;  // velocity range of fresh particles, pixels/frame

  bool operator==(const FilterParams&) const = default;
};

void validate(const MotionModel& motion);
void validate(const DetectorModel& detector);
void validate(const FilterParams& filter);

/// Unweighted multiset of particles. Never empty.
class ParticleBelief {
 public:
  explicit ParticleBelief(std::vector<State> particles);

  /// m particles uniform over the plane with velocities uniform in
  /// [-v_max, v_max]^2.
  static ParticleBelief uniform(const TileCoding& coder, std::size_t m,
                                double v_max, Rng& rng);

  std::span<const State> particles() const { return particles_; }
  std::span<State> particles() { return particles_; }
  std::size_t size() const { return particles_.size(); }
  const State& operator[](std::size_t i) const { return particles_[i]; }

  bool operator==(const ParticleBelief&) const = default;

 private:
  std::vector<State> particles_;
};

/// One detector result for a selected box.
struct Detection {
  BoxIndex box = 0;
  bool detected = false;
  double x = 0;  // reported location; meaningful only when detected
  double y = 0;
};

/// Detector output over a selection. Entries align with the selected boxes;
/// every unselected box carries the null observation implicitly.
struct Observation {
  std::vector<Detection> entries;

  bool any_detection() const;
};

struct UpdateResult {
  ParticleBelief belief;
  std::size_t survivors = 0;  // particles accepted by rejection
  std::size_t injected = 0;   // fresh particles in the output
  bool degenerate = false;    // nothing survived; output is all injected
  std::vector<std::uint32_t> survivor_indices;  // into the input belief
};

/// x += vx + N(0, sigma_x^2), likewise for y; velocities unchanged;
/// positions clamped to the plane.
ParticleBelief predict(ParticleBelief belief, const MotionModel& motion,
                       const TileCoding& coder, Rng& rng);

/// Samples the detector over `selection` given the true states of everyone in
/// the scene.
Observation simulate_observation(std::span<const State> truth,
                                 std::span<const BoxIndex> selection,
                                 const DetectorModel& detector,
                                 const TileCoding& coder, Rng& rng);

/// Monte Carlo belief update on the detect/no-detect pattern of z.
///
/// Each particle is accepted with probability L(p) / max_q L(q), where L is
/// the likelihood of z's binary pattern under the detector model and the max
/// runs over the input particles. With a noiseless detector this keeps
/// exactly the particles whose coverage pattern matches z. Survivors are
/// resampled with replacement to floor((1 - inject_fraction) * m) and the
/// rest is filled with fresh particles: around a reported location when z
/// holds a detection, otherwise uniform over the plane.
UpdateResult update(const ParticleBelief& belief,
                    std::span<const BoxIndex> selection, const Observation& z,
                    const DetectorModel& detector, const FilterParams& filter,
                    const TileCoding& coder, Rng& rng);

}  // namespace partimax
