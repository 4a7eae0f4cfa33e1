#include "partimax/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace partimax {

void validate(const MotionModel& m) {
  if (!(m.sigma_x >= 0) || !(m.sigma_y >= 0))
    throw std::invalid_argument("motion sigmas must be non-negative");
}

void validate(const DetectorModel& d) {
  if (!(d.p_false >= 0) || !(d.p_false < d.p_detect) || !(d.p_detect <= 1))
    throw std::invalid_argument("detector needs 0 <= p_false < p_detect <= 1");
  if (!(d.loc_noise >= 0))
    throw std::invalid_argument("detector loc_noise must be non-negative");
}

void validate(const FilterParams& f) {
  if (f.particles == 0) throw std::invalid_argument("filter needs particles > 0");
  if (!(f.inject_fraction >= 0) || !(f.inject_fraction <= 1))
    throw std::invalid_argument("inject_fraction must lie in [0, 1]");
  if (!(f.v_max >= 0)) throw std::invalid_argument("v_max must be non-negative");
}

ParticleBelief::ParticleBelief(std::vector<State> particles)
    : particles_(std::move(particles)) {
  if (particles_.empty())
    throw std::invalid_argument("a particle belief must be nonempty");
}

namespace {

State random_state(const TileCoding& coder, double v_max, Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, coder.width());
  std::uniform_real_distribution<double> uy(0.0, coder.height());
  std::uniform_real_distribution<double> uv(-v_max, v_max);
  State s;
  s.x = ux(rng);
  s.y = uy(rng);
  s.vx = uv(rng);
  s.vy = uv(rng);
  return s;
}

double gaussian(double sigma, Rng& rng) {
  if (sigma <= 0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

}  // namespace

ParticleBelief ParticleBelief::uniform(const TileCoding& coder, std::size_t m,
                                       double v_max, Rng& rng) {
  std::vector<State> ps;
  ps.reserve(m);
  for (std::size_t i = 0; i < m; ++i) ps.push_back(random_state(coder, v_max, rng));
  return ParticleBelief(std::move(ps));
}

bool Observation::any_detection() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const Detection& d) { return d.detected; });
}

ParticleBelief predict(ParticleBelief belief, const MotionModel& motion,
                       const TileCoding& coder, Rng& rng) {
  for (State& s : belief.particles()) {
    s.x = coder.clamp_x(s.x + s.vx + gaussian(motion.sigma_x, rng));
    s.y = coder.clamp_y(s.y + s.vy + gaussian(motion.sigma_y, rng));
  }
  return belief;
}

Observation simulate_observation(std::span<const State> truth,
                                 std::span<const BoxIndex> selection,
                                 const DetectorModel& detector,
                                 const TileCoding& coder, Rng& rng) {
  std::bernoulli_distribution hit(detector.p_detect);
  std::bernoulli_distribution false_alarm(detector.p_false);
  Observation z;
  z.entries.reserve(selection.size());
  for (BoxIndex b : selection) {
    Detection d;
    d.box = b;
    const State* present = nullptr;
    for (const State& s : truth) {
      if (coder.contains(b, s.x, s.y)) {
        present = &s;
        break;
      }
    }
    if (present != nullptr) {
      if (hit(rng)) {
        d.detected = true;
        d.x = coder.clamp_x(present->x + gaussian(detector.loc_noise, rng));
        d.y = coder.clamp_y(present->y + gaussian(detector.loc_noise, rng));
      }
    } else if (false_alarm(rng)) {
      const PixelBox pb = coder.box(b);
      const double x0 = std::max(pb.x0, 0.0), x1 = std::min(pb.x1, coder.width());
      const double y0 = std::max(pb.y0, 0.0), y1 = std::min(pb.y1, coder.height());
      d.detected = true;
      d.x = std::uniform_real_distribution<double>(x0, x1)(rng);
      d.y = std::uniform_real_distribution<double>(y0, y1)(rng);
    }
    z.entries.push_back(d);
  }
  return z;
}

namespace {

// Likelihood of one binary outcome kept as (number of zero factors, log of
// the product of the nonzero factors), so a noiseless channel stays exact.
struct LogLikelihood {
  int zeros = 0;
  double log = 0.0;

  void multiply(double p) {
    if (p <= 0.0)
      ++zeros;
    else
      log += std::log(p);
  }
  void divide(double p) {
    if (p <= 0.0)
      --zeros;
    else
      log -= std::log(p);
  }
};

}  // namespace

UpdateResult update(const ParticleBelief& belief,
                    std::span<const BoxIndex> selection, const Observation& z,
                    const DetectorModel& detector, const FilterParams& filter,
                    const TileCoding& coder, Rng& rng) {
  if (z.entries.size() != selection.size())
    throw std::invalid_argument("observation does not match the selection");

  // Sorted (box, outcome) lookup for the covering-box test.
  std::vector<std::pair<BoxIndex, bool>> observed;
  observed.reserve(selection.size());
  for (std::size_t i = 0; i < selection.size(); ++i)
    observed.emplace_back(selection[i], z.entries[i].detected);
  std::sort(observed.begin(), observed.end());

  auto p_outside = [&](bool det) { return det ? detector.p_false : 1.0 - detector.p_false; };
  auto p_inside = [&](bool det) { return det ? detector.p_detect : 1.0 - detector.p_detect; };

  // Every particle starts from "outside all selected boxes" and swaps in the
  // in-box factor for each selected box that covers it.
  LogLikelihood base;
  for (const auto& [box, det] : observed) base.multiply(p_outside(det));

  const std::size_t m = belief.size();
  const std::size_t t = coder.tilings();
  std::vector<LogLikelihood> lik(m, base);
  std::vector<BoxIndex> cover(t);
  for (std::size_t p = 0; p < m; ++p) {
    coder.covers(belief[p].x, belief[p].y, cover);
    for (BoxIndex b : cover) {
      auto it = std::lower_bound(observed.begin(), observed.end(),
                                 std::make_pair(b, false));
      if (it == observed.end() || it->first != b) continue;
      lik[p].divide(p_outside(it->second));
      lik[p].multiply(p_inside(it->second));
    }
  }

  double envelope = -std::numeric_limits<double>::infinity();
  for (const auto& l : lik)
    if (l.zeros == 0) envelope = std::max(envelope, l.log);

  UpdateResult out{belief, 0, 0, false, {}};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t p = 0; p < m; ++p) {
    if (lik[p].zeros != 0) continue;
    const double accept = std::exp(lik[p].log - envelope);
    if (unit(rng) < accept) out.survivor_indices.push_back(static_cast<std::uint32_t>(p));
  }
  out.survivors = out.survivor_indices.size();

  std::vector<State> next;
  next.reserve(m);
  if (out.survivors == 0) {
    out.degenerate = true;
  } else {
    const auto keep = static_cast<std::size_t>(
        std::floor((1.0 - filter.inject_fraction) * static_cast<double>(m)));
    std::uniform_int_distribution<std::size_t> pick(0, out.survivors - 1);
    for (std::size_t i = 0; i < keep; ++i)
      next.push_back(belief[out.survivor_indices[pick(rng)]]);
  }

  std::vector<const Detection*> hits;
  for (const Detection& d : z.entries)
    if (d.detected) hits.push_back(&d);
  std::uniform_real_distribution<double> uv(-filter.v_max, filter.v_max);
  while (next.size() < m) {
    if (hits.empty()) {
      next.push_back(random_state(coder, filter.v_max, rng));
    } else {
      const Detection& d =
          *hits[std::uniform_int_distribution<std::size_t>(0, hits.size() - 1)(rng)];
      State s;
      s.x = coder.clamp_x(d.x + gaussian(detector.loc_noise, rng));
      s.y = coder.clamp_y(d.y + gaussian(detector.loc_noise, rng));
      s.vx = uv(rng);
      s.vy = uv(rng);
      next.push_back(s);
    }
    ++out.injected;
  }
  out.belief = ParticleBelief(std::move(next));
  return out;
}

}  // namespace partimax
