#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pso/problem.hpp"
#include "pso/rng.hpp"

namespace pso {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class BoundsPolicy { clamp, reflect, pbest_gate };

std::string_view to_string(BoundsPolicy policy);
BoundsPolicy parse_bounds_policy(std::string_view text);

struct RunConfig {
  std::size_t swarm_size = 75;
  std::size_t max_evals = 75'000;
  std::size_t runs = 25;
  std::vector<std::size_t> dims;
  std::uint64_t seed = 0;
  /// Unset: each strategy uses its own default policy.
  std::optional<BoundsPolicy> bounds_policy;

  void validate() const;
};

struct Particle {
  Vec x;
  Vec vel;
  Vec pbest_x;
  double f = kInf;        // fitness at x; +inf when x was not evaluated
  double pbest_f = kInf;
  int stall = 0;          // iterations since pbest last improved (g_i)
};

struct LocalBest {
  Vec x;
  double f = kInf;
  std::size_t index = 0;  // particle owning the memory
};

struct SwarmState {
  std::vector<Particle> particles;
  Vec gbest_x;
  double gbest_f = kInf;
  std::size_t gbest_index = 0;
  /// Sub-swarm id per particle; lbest[id] is that sub-swarm's best memory.
  std::vector<std::size_t> subswarm_of;
  std::vector<LocalBest> lbest;
  std::size_t evals_used = 0;
  std::size_t iteration = 0;

  std::size_t size() const { return particles.size(); }
  std::size_t dim() const { return gbest_x.size(); }

  /// Reassigns sub-swarms and recomputes every lbest from scratch.
  void set_subswarms(std::vector<std::size_t> assignment);
  /// Recomputes gbest and lbest. Ties keep the incumbent memory.
  void refresh_bests();
  /// True when gbest and every lbest match the minimum over member pbests.
  bool bests_consistent() const;
};

/// Applies the bounds policy in place. Returns false only for pbest_gate when
/// some coordinate lies outside the box (the position is then left as is).
bool apply_bounds(std::span<double> x, std::span<double> vel, const Problem& problem,
                  BoundsPolicy policy);

/// Caps each velocity component at frac * (upper - lower); frac <= 0 disables.
void clamp_velocity(std::span<double> vel, const Problem& problem, double frac);

/// A proposed move for one particle.
struct Proposal {
  std::size_t index = 0;
  Vec x;
  Vec vel;
};

/// A proposal after bounds handling and evaluation.
struct Evaluated {
  Proposal move;
  double f = kInf;
  bool in_bounds = true;
};

struct Outcome {
  std::size_t index = 0;
  double parent_f = kInf;  // particle fitness before the move
  double f = kInf;
  bool in_bounds = true;
  bool improved = false;   // pbest replaced
};

class Evaluator;

/// Uniform positions in the box, zero velocities, pbest = initial position.
/// Consumes exactly swarm_size evaluations.
SwarmState initialize_swarm(Evaluator& evaluator, const RunConfig& cfg, RngStream& rng);
SwarmState initialize_swarm(const Problem& problem, const RunConfig& cfg, RngStream& rng);

/// Moves particles, replaces pbest on strict in-bounds improvement, updates
/// the stall counters and recomputes gbest/lbest.
std::vector<Outcome> update_memories(SwarmState& state, std::vector<Evaluated> evaluated);

}  // namespace pso
