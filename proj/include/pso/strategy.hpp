#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pso/optimizer.hpp"
#include "pso/swarm.hpp"

namespace pso {

enum class StrategyKind {
  pso_ldw,
  pso_tvac,
  constriction,
  fips,
  lips,
  cl,
  cl_gbest,
  dnl,
  fdr,
  dls,
  dms,
  sl,
  mfl,
  al,
  mal,
  upso,
  epso,
  sdl,
  ol,
};

std::string_view kind_name(StrategyKind kind);
/// Short registry name (FIS, DMS, CL, ...) or the kind name for kinds
/// outside the comparison table.
std::string_view short_name(StrategyKind kind);

/// Strategy identity plus tunables. Parameters not present in `params` take
/// the kind's defaults.
struct StrategySpec {
  StrategyKind kind = StrategyKind::pso_ldw;
  std::map<std::string, double> params;

  double get(std::string_view name) const;
  StrategySpec with(std::string_view name, double value) const;
};

/// Default parameter table for a kind.
const std::map<std::string, double>& default_params(StrategyKind kind);

StrategySpec default_spec(StrategyKind kind);

/// Throws ConfigError for unknown parameter names, probabilities outside
/// [0, 1] and acceleration coefficients given to MAL.
void validate_spec(const StrategySpec& spec);

/// Resolves a registry short name (case-insensitive) or a kind name. Unknown
/// names throw ConfigError listing the valid ones.
StrategySpec parse_strategy(std::string_view name);

/// The thirteen strategies of the comparison, in table order.
const std::vector<std::string>& registry_names();

/// Linear schedule over run progress in [0, 1].
double schedule(double start, double end, double progress);

/// Clerc-Kennedy constriction factor for a total gain c > 4.
double constriction_chi(double c_total);

struct StepContext {
  Evaluator& evaluator;
  const Problem& problem;
  double progress = 0.0;  // evaluations used / budget
};

/// One learning strategy. The loop calls step() once per iteration; it must
/// not touch particle memories (pbest, gbest) other than resetting stall
/// counters when an exemplar is rebuilt.
class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual StrategyKind kind() const = 0;
  virtual BoundsPolicy default_bounds() const { return BoundsPolicy::pbest_gate; }

  /// Called once after swarm initialization. Throws ConfigError when the
  /// swarm does not satisfy the strategy's preconditions.
  virtual void initialize(SwarmState& state, StepContext& ctx, RngStream& rng);
  /// Per-iteration preparation shared by all particles.
  virtual void prepare(SwarmState& state, StepContext& ctx, RngStream& rng);
  /// Move for particle i. May reset particle i's stall counter when it
  /// rebuilds that particle's exemplar; nothing else in `state` changes.
  virtual Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx,
                           RngStream& rng) = 0;
  /// Default: prepare, then propose for every particle in index order.
  virtual std::vector<Proposal> step(SwarmState& state, StepContext& ctx, RngStream& rng);
  virtual void observe(SwarmState& state, std::span<const Outcome> outcomes, StepContext& ctx);

  /// Per-particle, per-dimension attraction span (rows = particles) for the
  /// strategies with a potential search-volume formulation.
  virtual std::optional<std::vector<Vec>> search_lengths(const SwarmState& state) const;
};

std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec);

}  // namespace pso
