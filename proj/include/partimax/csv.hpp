#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "partimax/belief.hpp"
#include "partimax/simulate.hpp"

namespace partimax {

inline constexpr const char* kBenchmarkHeader =
    "algorithm,k,r,people,seed,trajectory_id,correct_predictions,timesteps,"
    "mean_selection_time_us,gain_evaluations,boxes_fraction";

/// Writes the header and one line per successful row. Failed rows are
/// skipped. With record_timing false the timing column is written as 0.
void write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRow> rows,
                         bool record_timing);
std::string format_benchmark_row(const BenchmarkRow& row, bool record_timing);

class ParticleParseError : public std::runtime_error {
 public:
  ParticleParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads "x,y,vx,vy" rows. An optional header line starting with "x" is
/// skipped, as are blank lines. Throws ParticleParseError with the 1-based
/// line number of the first malformed row, or line 0 for an empty file.
std::vector<State> read_particles_csv(std::istream& in);

void write_particles_csv(std::ostream& out, std::span<const State> particles);

}  // namespace partimax
