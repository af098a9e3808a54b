#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pso/problem.hpp"
#include "pso/rng.hpp"
#include "pso/swarm.hpp"

namespace pso {

/// One change point of the best-so-far curve: from evaluation `eval`
/// (1-based) onwards the best fitness is `best_f`.
struct TracePoint {
  std::size_t eval = 0;
  double best_f = kInf;

  bool operator==(const TracePoint&) const = default;
};

/// Run-length compressed best-so-far trace.
class Trace {
 public:
  void record(std::size_t eval, double f);
  /// Best fitness after `eval` evaluations (+inf before the first).
  double best_at(std::size_t eval) const;
  std::span<const TracePoint> points() const { return points_; }
  bool empty() const { return points_.empty(); }

  bool operator==(const Trace&) const = default;

 private:
  std::vector<TracePoint> points_;
};

/// Owns the evaluation budget. Every objective call in a run goes through it.
class Evaluator {
 public:
  enum class Track { best, none };

  Evaluator(const Problem& problem, std::size_t budget);

  /// Counts one evaluation. Tracked evaluations feed the best-so-far trace.
  /// Throws EvaluationError on non-finite input or output, std::logic_error
  /// past the budget.
  double operator()(std::span<const double> x, Track track = Track::best);

  const Problem& problem() const { return problem_; }
  std::size_t used() const { return used_; }
  std::size_t budget() const { return budget_; }
  std::size_t remaining() const { return budget_ - used_; }
  double best() const { return best_; }
  const Trace& trace() const { return trace_; }

 private:
  const Problem& problem_;
  std::size_t budget_;
  std::size_t used_ = 0;
  double best_ = kInf;
  Trace trace_;
};

struct Sample {
  std::size_t eval = 0;
  double value = 0.0;

  bool operator==(const Sample&) const = default;
};

struct RunRecord {
  std::string problem;
  std::string strategy;
  std::uint64_t seed = 0;
  Trace trace;
  std::vector<Sample> diversity;   // one per iteration boundary
  std::vector<Sample> log_volume;  // mean log search volume, when requested
  double final_best = kInf;
  std::size_t evals_used = 0;
  std::size_t iterations = 0;
  double wall_ms = 0.0;
  bool stalled = false;            // stopped by the no-evaluation guard

  /// Equality of everything except wall time.
  bool same_result(const RunRecord& other) const;
};

struct StrategySpec;
class Strategy;

struct RunOptions {
  bool record_diversity = true;
  bool record_volume = false;
  /// Called once per iteration with the state before the move and the
  /// proposals the strategy produced.
  std::function<void(const SwarmState&, std::span<const Proposal>)> on_proposals;
  /// Called after memories are updated.
  std::function<void(const SwarmState&)> on_iteration;
};

RunRecord run_optimizer(const Problem& problem, const StrategySpec& spec, const RunConfig& cfg,
                        RngStream& rng, const RunOptions& options = {});

/// Same loop with a caller-owned strategy instance.
RunRecord run_optimizer(const Problem& problem, Strategy& strategy, const RunConfig& cfg,
                        RngStream& rng, const RunOptions& options = {});

}  // namespace pso
