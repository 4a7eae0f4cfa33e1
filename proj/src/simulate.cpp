#include "partimax/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <omp.h>

namespace partimax {

State step_true_state(const State& s, const MotionModel& motion,
                      const TileCoding& coder, Rng& rng) {
  auto noise = [&](double sigma) {
    return sigma > 0 ? std::normal_distribution<double>(0.0, sigma)(rng) : 0.0;
  };
  State next = s;
  next.x = s.x + s.vx + noise(motion.sigma_x);
  next.y = s.y + s.vy + noise(motion.sigma_y);
  const double w = coder.width(), h = coder.height();
  if (next.x > w) {
    next.x = 2 * w - next.x;
    next.vx = -next.vx;
  } else if (next.x < 0) {
    next.x = -next.x;
    next.vx = -next.vx;
  }
  if (next.y > h) {
    next.y = 2 * h - next.y;
    next.vy = -next.vy;
  } else if (next.y < 0) {
    next.y = -next.y;
    next.vy = -next.vy;
  }
  next.x = coder.clamp_x(next.x);
  next.y = coder.clamp_y(next.y);
  return next;
}

Trajectory gen_trajectory_from(const State& start, std::size_t steps,
                               const MotionModel& motion,
                               const TileCoding& coder, Rng& rng,
                               int person_id) {
  if (steps == 0) throw std::invalid_argument("trajectory needs at least one step");
  Trajectory tr;
  tr.person_id = person_id;
  tr.states.reserve(steps);
  tr.states.push_back(start);
  while (tr.states.size() < steps)
    tr.states.push_back(step_true_state(tr.states.back(), motion, coder, rng));
  return tr;
}

Trajectory gen_trajectory(Rng& rng, std::size_t steps, const MotionModel& motion,
                          const TileCoding& coder, double v_max, int person_id) {
  State start;
  start.x = std::uniform_real_distribution<double>(0.0, coder.width())(rng);
  start.y = std::uniform_real_distribution<double>(0.0, coder.height())(rng);
  std::uniform_real_distribution<double> uv(-v_max, v_max);
  start.vx = uv(rng);
  start.vy = uv(rng);
  return gen_trajectory_from(start, steps, motion, coder, rng, person_id);
}

double EpisodeResult::mean_selection_time_us() const {
  if (selection_time_us.empty()) return 0.0;
  return std::accumulate(selection_time_us.begin(), selection_time_us.end(), 0.0) /
         static_cast<double>(selection_time_us.size());
}

BoxIndex mode_box(const ParticleBelief& belief, const TileCoding& coder) {
  std::vector<std::uint32_t> counts(coder.box_count(), 0);
  std::vector<BoxIndex> touched;
  std::vector<BoxIndex> cover(coder.tilings());
  for (const State& s : belief.particles()) {
    coder.covers(s.x, s.y, cover);
    for (BoxIndex b : cover)
      if (counts[b]++ == 0) touched.push_back(b);
  }
  BoxIndex best = touched.front();
  for (BoxIndex b : touched)
    if (counts[b] > counts[best] || (counts[b] == counts[best] && b < best)) best = b;
  return best;
}

EpisodeResult run_episode(std::span<const Trajectory> trajectories,
                          const SelectorSpec& selector,
                          const EpisodeConfig& config, const TileCoding& coder,
                          Rng& rng) {
  if (trajectories.empty()) throw std::invalid_argument("episode needs at least one person");
  const std::size_t steps = trajectories.front().states.size();
  for (const Trajectory& tr : trajectories)
    if (tr.states.size() != steps)
      throw std::invalid_argument("all trajectories must have the same length");

  const std::size_t people = trajectories.size();
  const FilterParams& filter = config.filter;

  std::vector<ParticleBelief> beliefs;
  beliefs.reserve(people);
  for (std::size_t p = 0; p < people; ++p)
    beliefs.push_back(ParticleBelief::uniform(coder, filter.particles, filter.v_max, rng));

  std::vector<BoxIndex> brute_boxes;
  if (selector.algorithm == Algorithm::brute) {
    brute_boxes.resize(coder.boxes_in_tiling(0));
    std::iota(brute_boxes.begin(), brute_boxes.end(), coder.tiling_begin(0));
  }

  EpisodeResult result;
  result.timesteps = steps;
  result.people = people;
  result.boxes_per_frame =
      selector.algorithm == Algorithm::brute ? brute_boxes.size() : selector.k;
  result.boxes_fraction =
      static_cast<double>(result.boxes_per_frame) / static_cast<double>(coder.box_count());

  GainTable table(coder);
  std::vector<State> pooled;
  std::vector<State> truth(people);
  std::size_t correct = 0;

  for (std::size_t step = 0; step < steps; ++step) {
    pooled.clear();
    for (std::size_t p = 0; p < people; ++p) {
      beliefs[p] = predict(std::move(beliefs[p]), config.motion, coder, rng);
      const auto ps = beliefs[p].particles();
      pooled.insert(pooled.end(), ps.begin(), ps.end());
      truth[p] = trajectories[p].states[step];
    }

    std::vector<BoxIndex> boxes;
    double elapsed = 0;
    if (selector.algorithm == Algorithm::brute) {
      const auto start = std::chrono::steady_clock::now();
      boxes = brute_boxes;
      elapsed = std::chrono::duration<double, std::micro>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    } else if (selector.k > 0) {
      SelectorParams params;
      params.k = selector.k;
      params.r = selector.r;
      params.max_rejects = selector.max_rejects;
      params.seed = rng();
      Selection sel;
      switch (selector.algorithm) {
        case Algorithm::greedy: sel = greedy_max(pooled, params.k, table); break;
        case Algorithm::sgm: sel = stochastic_greedy_max(pooled, params, table); break;
        case Algorithm::partimax: sel = partimax(pooled, params, table); break;
        case Algorithm::brute: break;
      }
      boxes = std::move(sel.boxes);
      elapsed = sel.elapsed_us;
      result.gain_evaluations += sel.gain_evaluations;
      result.sample_draws += sel.sample_draws;
    }
    result.selection_time_us.push_back(elapsed);
    if (config.time_budget_us > 0 && elapsed > config.time_budget_us)
      ++result.budget_overruns;

    Observation z;
    if (!boxes.empty())
      z = simulate_observation(truth, boxes, config.detector, coder, rng);

    for (std::size_t p = 0; p < people; ++p) {
      UpdateResult up = update(beliefs[p], boxes, z, config.detector, filter, coder, rng);
      if (up.degenerate) ++result.degenerate_updates;
      beliefs[p] = std::move(up.belief);
      if (coder.contains(mode_box(beliefs[p], coder), truth[p].x, truth[p].y)) ++correct;
    }
  }
  result.correct_predictions = static_cast<double>(correct) / static_cast<double>(people);
  return result;
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  // splitmix64 over the parts
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t v : parts) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    std::uint64_t z = (h += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    h = z ^ (z >> 31);
  }
  return h;
}

namespace {

bool uses_r(Algorithm a) { return a == Algorithm::sgm || a == Algorithm::partimax; }

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config) {
  const TileCoding coder(config.geometry);

  std::vector<BenchmarkRow> rows;
  for (Algorithm alg : config.algorithms) {
    std::vector<std::size_t> ks = config.k_values;
    if (alg == Algorithm::brute) ks = {coder.boxes_in_tiling(0)};
    std::vector<std::size_t> rs = uses_r(alg) ? config.r_values : std::vector<std::size_t>{0};
    for (std::size_t k : ks)
      for (std::size_t r : rs)
        for (std::size_t people : config.people)
          for (std::uint64_t seed : config.seeds)
            for (std::size_t tr = 0; tr < config.trajectories; ++tr) {
              BenchmarkRow row;
              row.algorithm = alg;
              row.k = k;
              row.r = r;
              row.people = people;
              row.seed = seed;
              row.trajectory_id = tr;
              rows.push_back(row);
            }
  }

  const auto count = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, config.jobs))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    BenchmarkRow& row = rows[static_cast<std::size_t>(i)];
    try {
      Rng walk_rng(derive_seed({row.seed, row.people, row.trajectory_id, 0x77616c6bULL}));
      std::vector<Trajectory> walks;
      for (std::size_t p = 0; p < row.people; ++p)
        walks.push_back(gen_trajectory(walk_rng, config.timesteps, config.episode.motion,
                                       coder, config.episode.filter.v_max,
                                       static_cast<int>(p)));
      SelectorSpec spec{row.algorithm, row.k, row.r, config.max_rejects};
      Rng rng(derive_seed({row.seed, row.people, row.trajectory_id,
                           static_cast<std::uint64_t>(row.algorithm), row.k, row.r}));
      row.result = run_episode(walks, spec, config.episode, coder, rng);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  return rows;
}

}  // namespace partimax
