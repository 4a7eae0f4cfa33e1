// partimax: benchmark sweeps, bound verification and one-off box selection.
//
//   partimax --mode bench  --config sweep.ini --out results.csv [--jobs N]
//   partimax --mode verify [--suite nemhauser]
//   partimax --mode select --config select.ini --belief particles.csv
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "partimax/config.hpp"
#include "partimax/csv.hpp"
#include "partimax/select.hpp"
#include "partimax/simulate.hpp"
#include "partimax/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

int cmd_bench(const partimax::RunConfig& config) {
  std::ofstream out(config.out);
  if (!out) {
    std::cerr << "error: cannot write " << config.out << "\n";
    return kUsage;
  }
  const auto rows = partimax::run_benchmark(config.benchmark());
  partimax::write_benchmark_csv(out, rows, config.record_timing);
  int failures = 0;
  for (const auto& row : rows) {
    if (!row.error) continue;
    ++failures;
    std::cerr << "episode failed: " << partimax::to_string(row.algorithm) << " k=" << row.k
              << " r=" << row.r << " people=" << row.people << " seed=" << row.seed
              << " trajectory=" << row.trajectory_id << ": " << *row.error << "\n";
  }
  if (!out) {
    std::cerr << "error: failed while writing " << config.out << "\n";
    return kUsage;
  }
  std::cerr << rows.size() - failures << " rows written to " << config.out << "\n";
  return kOk;
}

int cmd_verify(const partimax::RunConfig& config, const std::optional<std::string>& suite) {
  partimax::VerifyOptions options;
  options.seed = config.seed;
  bool all_passed = true;
  for (std::string_view name : partimax::suite_names()) {
    if (suite && *suite != name) continue;
    const auto result = partimax::run_suite(name, options);
    std::cout << partimax::format_suite_line(result) << std::endl;
    all_passed = all_passed && result.passed;
  }
  return all_passed ? kOk : kVerifyFailed;
}

int cmd_select(const partimax::RunConfig& config, const std::string& belief_path) {
  std::ifstream in(belief_path);
  if (!in) {
    std::cerr << "error: cannot open belief file " << belief_path << "\n";
    return kUsage;
  }
  std::vector<partimax::State> particles;
  try {
    particles = partimax::read_particles_csv(in);
  } catch (const partimax::ParticleParseError& e) {
    std::cerr << "error: " << belief_path << ": " << e.what() << "\n";
    return kUsage;
  }
  const partimax::TileCoding coder(config.geometry);
  partimax::SelectorParams params{config.select_k, config.select_r, config.seed,
                                  config.max_rejects};
  partimax::Selection sel;
  switch (config.select_algorithm) {
    case partimax::Algorithm::greedy: sel = partimax::greedy_max(particles, coder, params.k); break;
    case partimax::Algorithm::sgm: sel = partimax::stochastic_greedy_max(particles, coder, params); break;
    case partimax::Algorithm::partimax: sel = partimax::partimax(particles, coder, params); break;
    case partimax::Algorithm::brute:
      std::cerr << "error: select mode supports greedy, sgm and partimax\n";
      return kUsage;
  }
  for (std::size_t i = 0; i < sel.boxes.size(); ++i)
    std::cout << (i ? " " : "") << sel.boxes[i];
  std::cout << "\npcf " << sel.utility << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle-coverage box selection: benchmark, verify, select"};
  std::string config_path;
  std::optional<std::string> mode, out, suite, belief;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "bench | verify | select")
      ->check(CLI::IsMember({"bench", "verify", "select"}));
  app.add_option("--seed", seed, "overrides run.seed (and the sweep seed list)");
  app.add_option("--out", out, "benchmark CSV path");
  app.add_option("--suite", suite, "run one verification suite");
  app.add_option("--jobs", jobs, "worker threads for the benchmark sweep")
      ->check(CLI::PositiveNumber);
  app.add_option("--belief", belief, "particle CSV for select mode");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  partimax::RunConfig config;
  try {
    if (!config_path.empty()) config = partimax::load_config(config_path);
    if (mode) config.mode = *mode;
    if (out) config.out = *out;
    if (jobs) config.jobs = *jobs;
    if (seed) {
      config.seed = *seed;
      config.seeds = {*seed};
    }
    partimax::validate(config);
  } catch (const partimax::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  }

  if (suite) {
    bool known = false;
    for (auto name : partimax::suite_names()) known = known || name == *suite;
    if (!known) {
      std::cerr << "error: unknown suite " << *suite << "\n";
      return kUsage;
    }
  }

  try {
    if (config.mode == "bench") return cmd_bench(config);
    if (config.mode == "verify") return cmd_verify(config, suite);
    if (!belief) {
      std::cerr << "error: select mode needs --belief\n";
      return kUsage;
    }
    return cmd_select(config, *belief);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
