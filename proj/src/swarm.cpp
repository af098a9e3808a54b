#include "pso/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pso/errors.hpp"
#include "pso/optimizer.hpp"

namespace pso {

std::string_view to_string(BoundsPolicy policy) {
  switch (policy) {
    case BoundsPolicy::clamp: return "clamp";
    case BoundsPolicy::reflect: return "reflect";
    case BoundsPolicy::pbest_gate: return "pbest_gate";
  }
  return "?";
}

BoundsPolicy parse_bounds_policy(std::string_view text) {
  if (text == "clamp") return BoundsPolicy::clamp;
  if (text == "reflect") return BoundsPolicy::reflect;
  if (text == "pbest_gate") return BoundsPolicy::pbest_gate;
  throw ConfigError("unknown bounds policy '" + std::string(text) +
                    "' (expected clamp, reflect or pbest_gate)");
}

void RunConfig::validate() const {
  if (swarm_size < 3) throw ConfigError("swarm size must be at least 3");
  if (max_evals < swarm_size) {
    throw ConfigError("evaluation budget (" + std::to_string(max_evals) +
                      ") is smaller than the swarm size (" + std::to_string(swarm_size) + ")");
  }
}

void SwarmState::set_subswarms(std::vector<std::size_t> assignment) {
  if (assignment.size() != particles.size()) {
    throw ConfigError("sub-swarm assignment must cover every particle");
  }
  subswarm_of = std::move(assignment);
  std::size_t groups = 0;
  for (auto g : subswarm_of) groups = std::max(groups, g + 1);
  lbest.assign(groups, LocalBest{});
  for (std::size_t i = 0; i < particles.size(); ++i) {
    auto& best = lbest[subswarm_of[i]];
    if (particles[i].pbest_f < best.f || best.x.empty()) {
      best.x = particles[i].pbest_x;
      best.f = particles[i].pbest_f;
      best.index = i;
    }
  }
}

void SwarmState::refresh_bests() {
  if (particles.empty()) return;
  // Hand-built states start as one sub-swarm.
  if (subswarm_of.size() != particles.size()) set_subswarms(std::vector<std::size_t>(particles.size(), 0));
  if (gbest_x.empty()) {
    gbest_index = 0;
    gbest_f = particles[0].pbest_f;
    gbest_x = particles[0].pbest_x;
  }
  // The incumbent's own memory may have improved in place.
  if (particles[gbest_index].pbest_f < gbest_f) {
    gbest_f = particles[gbest_index].pbest_f;
    gbest_x = particles[gbest_index].pbest_x;
  }
  for (std::size_t i = 0; i < particles.size(); ++i) {
    if (particles[i].pbest_f < gbest_f) {
      gbest_f = particles[i].pbest_f;
      gbest_x = particles[i].pbest_x;
      gbest_index = i;
    }
  }
  for (auto& best : lbest) {
    const auto& owner = particles[best.index];
    if (owner.pbest_f < best.f) {
      best.f = owner.pbest_f;
      best.x = owner.pbest_x;
    }
  }
  for (std::size_t i = 0; i < particles.size(); ++i) {
    auto& best = lbest[subswarm_of[i]];
    if (particles[i].pbest_f < best.f) {
      best.f = particles[i].pbest_f;
      best.x = particles[i].pbest_x;
      best.index = i;
    }
  }
}

bool SwarmState::bests_consistent() const {
  double min_f = kInf;
  for (const auto& p : particles) min_f = std::min(min_f, p.pbest_f);
  if (gbest_f != min_f) return false;
  std::vector<double> group_min(lbest.size(), kInf);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    group_min[subswarm_of[i]] = std::min(group_min[subswarm_of[i]], particles[i].pbest_f);
  }
  for (std::size_t g = 0; g < lbest.size(); ++g) {
    if (lbest[g].f != group_min[g]) return false;
  }
  return true;
}

bool apply_bounds(std::span<double> x, std::span<double> vel, const Problem& problem,
                  BoundsPolicy policy) {
  bool inside = true;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double lo = problem.lower[d];
    const double hi = problem.upper[d];
    if (x[d] >= lo && x[d] <= hi) continue;
    switch (policy) {
      case BoundsPolicy::clamp:
        x[d] = std::clamp(x[d], lo, hi);
        vel[d] = 0.0;
        break;
      case BoundsPolicy::reflect:
        x[d] = x[d] < lo ? lo + (lo - x[d]) : hi - (x[d] - hi);
        // Overshoot by more than the box width: settle on the boundary.
        x[d] = std::clamp(x[d], lo, hi);
        vel[d] = -vel[d];
        break;
      case BoundsPolicy::pbest_gate:
        inside = false;
        break;
    }
  }
  return inside;
}

void clamp_velocity(std::span<double> vel, const Problem& problem, double frac) {
  if (frac <= 0.0) return;
  for (std::size_t d = 0; d < vel.size(); ++d) {
    const double vmax = frac * (problem.upper[d] - problem.lower[d]);
    vel[d] = std::clamp(vel[d], -vmax, vmax);
  }
}

SwarmState initialize_swarm(Evaluator& evaluator, const RunConfig& cfg, RngStream& rng) {
  const Problem& problem = evaluator.problem();
  problem.validate();
  cfg.validate();
  if (evaluator.remaining() < cfg.swarm_size) {
    throw ConfigError("evaluation budget is smaller than the swarm size");
  }
  SwarmState state;
  state.particles.resize(cfg.swarm_size);
  for (auto& p : state.particles) {
    p.x.resize(problem.dim);
    for (std::size_t d = 0; d < problem.dim; ++d) {
      p.x[d] = rng.uniform(problem.lower[d], problem.upper[d]);
    }
    p.vel.assign(problem.dim, 0.0);
    p.f = evaluator(p.x);
    p.pbest_x = p.x;
    p.pbest_f = p.f;
  }
  state.set_subswarms(std::vector<std::size_t>(cfg.swarm_size, 0));
  state.refresh_bests();
  state.evals_used = evaluator.used();
  return state;
}

SwarmState initialize_swarm(const Problem& problem, const RunConfig& cfg, RngStream& rng) {
  cfg.validate();
  Evaluator evaluator(problem, cfg.max_evals);
  return initialize_swarm(evaluator, cfg, rng);
}

std::vector<Outcome> update_memories(SwarmState& state, std::vector<Evaluated> evaluated) {
  std::vector<Outcome> outcomes;
  outcomes.reserve(evaluated.size());
  for (auto& e : evaluated) {
    auto& p = state.particles.at(e.move.index);
    Outcome out{e.move.index, p.f, e.f, e.in_bounds, false};
    p.x = std::move(e.move.x);
    p.vel = std::move(e.move.vel);
    p.f = e.f;
    if (e.in_bounds && e.f < p.pbest_f) {
      p.pbest_x = p.x;
      p.pbest_f = e.f;
      p.stall = 0;
      out.improved = true;
    } else {
      ++p.stall;
    }
    outcomes.push_back(out);
  }
  state.refresh_bests();
  return outcomes;
}

}  // namespace pso
