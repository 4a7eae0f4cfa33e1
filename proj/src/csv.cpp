#include "partimax/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>

namespace partimax {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_benchmark_row(const BenchmarkRow& row, bool record_timing) {
  const EpisodeResult& res = row.result;
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.3f",
                record_timing ? res.mean_selection_time_us() : 0.0);
  std::string line;
  line += to_string(row.algorithm);
  line += ',' + std::to_string(row.k);
  line += ',' + std::to_string(row.r);
  line += ',' + std::to_string(row.people);
  line += ',' + std::to_string(row.seed);
  line += ',' + std::to_string(row.trajectory_id);
  line += ',' + shortest(res.correct_predictions);
  line += ',' + std::to_string(res.timesteps);
  line += ',';
  line += timing;
  line += ',' + std::to_string(res.gain_evaluations);
  line += ',' + shortest(res.boxes_fraction);
  return line;
}

void write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRow> rows,
                         bool record_timing) {
  out << kBenchmarkHeader << '\n';
  for (const BenchmarkRow& row : rows) {
    if (row.error) continue;
    out << format_benchmark_row(row, record_timing) << '\n';
  }
  out.flush();
}

std::vector<State> read_particles_csv(std::istream& in) {
  std::vector<State> particles;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    if (particles.empty() && line == 1 && (text.front() == 'x' || text.front() == 'X'))
      continue;
    double values[4];
    std::string_view rest = text;
    for (int i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      if ((i < 3) != (comma != std::string_view::npos))
        throw ParticleParseError(line, "expected 4 comma-separated values");
      const std::string_view field = trim(rest.substr(0, comma));
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), values[i]);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        throw ParticleParseError(line, "not a number: '" + std::string(field) + "'");
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    particles.push_back({values[0], values[1], values[2], values[3]});
  }
  if (particles.empty()) throw ParticleParseError(0, "belief file holds no particles");
  return particles;
}

void write_particles_csv(std::ostream& out, std::span<const State> particles) {
  out << "x,y,vx,vy\n";
  for (const State& s : particles)
    out << shortest(s.x) << ',' << shortest(s.y) << ',' << shortest(s.vx) << ','
        << shortest(s.vy) << '\n';
}

}  // namespace partimax
