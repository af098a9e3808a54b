#pragma once

#include <cmath>
#include <initializer_list>
#include <span>

#include "pso/rng.hpp"
#include "pso/swarm.hpp"

namespace pso::detail {

/// One attraction term coef * r * (target - x).
struct Pull {
  double coef;
  std::span<const double> target;
};

/// vel' = w vel + sum_k coef_k r_k (target_k - x), per dimension, drawing
/// r_k in term order and skipping terms with a zero coefficient. The
/// velocity is capped at vmax * range before the move.
inline Proposal inertia_move(const Particle& p, std::size_t i, double w,
                             std::initializer_list<Pull> pulls, const Problem& problem,
                             double vmax, RngStream& rng) {
  Proposal out{i, p.x, p.vel};
  for (std::size_t d = 0; d < p.x.size(); ++d) {
    double v = w * p.vel[d];
    for (const auto& pull : pulls) {
      if (pull.coef != 0.0) v += pull.coef * rng.uniform() * (pull.target[d] - p.x[d]);
    }
    out.vel[d] = v;
  }
  clamp_velocity(out.vel, problem, vmax);
  for (std::size_t d = 0; d < p.x.size(); ++d) out.x[d] = p.x[d] + out.vel[d];
  return out;
}

/// Draws r for a term unless its coefficient is zero.
inline double draw(double coef, RngStream& rng) { return coef != 0.0 ? rng.uniform() : 0.0; }

inline void advance(Proposal& move, const Particle& p, const Problem& problem, double vmax) {
  clamp_velocity(move.vel, problem, vmax);
  for (std::size_t d = 0; d < p.x.size(); ++d) move.x[d] = p.x[d] + move.vel[d];
}

inline std::size_t as_count(double v) { return static_cast<std::size_t>(std::llround(v)); }

}  // namespace pso::detail
