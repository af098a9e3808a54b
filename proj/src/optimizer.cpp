#include "pso/optimizer.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pso/errors.hpp"
#include "pso/metrics.hpp"
#include "pso/strategy.hpp"

namespace pso {

void Trace::record(std::size_t eval, double f) {
  if (points_.empty() || f < points_.back().best_f) points_.push_back({eval, f});
}

double Trace::best_at(std::size_t eval) const {
  double best = kInf;
  for (const auto& p : points_) {
    if (p.eval > eval) break;
    best = p.best_f;
  }
  return best;
}

Evaluator::Evaluator(const Problem& problem, std::size_t budget)
    : problem_(problem), budget_(budget) {}

double Evaluator::operator()(std::span<const double> x, Track track) {
  if (used_ >= budget_) throw std::logic_error("evaluation past the budget");
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw EvaluationError("non-finite position passed to '" + problem_.name + "'");
    }
  }
  const double f = problem_.objective(x);
  ++used_;
  if (!std::isfinite(f)) {
    throw EvaluationError("objective '" + problem_.name + "' returned a non-finite value at " +
                          "evaluation " + std::to_string(used_));
  }
  if (track == Track::best) {
    if (f < best_) best_ = f;
    trace_.record(used_, best_);
  }
  return f;
}

bool RunRecord::same_result(const RunRecord& o) const {
  return problem == o.problem && strategy == o.strategy && seed == o.seed && trace == o.trace &&
         diversity == o.diversity && log_volume == o.log_volume && final_best == o.final_best &&
         evals_used == o.evals_used && iterations == o.iterations && stalled == o.stalled;
}

namespace {

constexpr std::size_t kMaxIdleIterations = 10'000;

void sample_metrics(const SwarmState& state, const Strategy& strategy, const RunOptions& options,
                    RunRecord& record) {
  if (options.record_diversity) {
    std::vector<Vec> positions;
    positions.reserve(state.size());
    for (const auto& p : state.particles) positions.push_back(p.x);
    record.diversity.push_back({state.evals_used, population_diversity(positions)});
  }
  if (options.record_volume) {
    if (auto lengths = strategy.search_lengths(state)) {
      record.log_volume.push_back({state.evals_used, potential_volume(*lengths).log_mean_volume});
    }
  }
}

}  // namespace

RunRecord run_optimizer(const Problem& problem, const StrategySpec& spec, const RunConfig& cfg,
                        RngStream& rng, const RunOptions& options) {
  auto strategy = make_strategy(spec);
  return run_optimizer(problem, *strategy, cfg, rng, options);
}

RunRecord run_optimizer(const Problem& problem, Strategy& strategy, const RunConfig& cfg,
                        RngStream& rng, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  problem.validate();
  cfg.validate();

  RunRecord record;
  record.problem = problem.name;
  record.strategy = std::string(short_name(strategy.kind()));
  record.seed = rng.seed();

  Evaluator evaluator(problem, cfg.max_evals);
  SwarmState state = initialize_swarm(evaluator, cfg, rng);
  StepContext ctx{evaluator, problem, 0.0};
  ctx.progress = static_cast<double>(evaluator.used()) / static_cast<double>(evaluator.budget());
  strategy.initialize(state, ctx, rng);
  state.evals_used = evaluator.used();
  const BoundsPolicy policy = cfg.bounds_policy.value_or(strategy.default_bounds());
  sample_metrics(state, strategy, options, record);

  std::size_t idle = 0;
  while (evaluator.remaining() > 0) {
    ctx.progress = static_cast<double>(evaluator.used()) / static_cast<double>(evaluator.budget());
    std::vector<Proposal> proposals = strategy.step(state, ctx, rng);
    if (options.on_proposals) options.on_proposals(state, proposals);

    const std::size_t used_before = evaluator.used();
    std::vector<Evaluated> evaluated;
    evaluated.reserve(proposals.size());
    for (auto& move : proposals) {
      if (evaluator.remaining() == 0) break;
      for (double v : move.x) {
        if (!std::isfinite(v)) {
          throw EvaluationError(record.strategy + " produced a non-finite position on '" +
                                problem.name + "'");
        }
      }
      Evaluated e;
      e.in_bounds = apply_bounds(move.x, move.vel, problem, policy);
      e.f = e.in_bounds ? evaluator(move.x) : kInf;
      e.move = std::move(move);
      evaluated.push_back(std::move(e));
    }

    std::vector<Outcome> outcomes = update_memories(state, std::move(evaluated));
    ++state.iteration;
    state.evals_used = evaluator.used();
    assert(state.bests_consistent());
    strategy.observe(state, outcomes, ctx);
    if (options.on_iteration) options.on_iteration(state);
    sample_metrics(state, strategy, options, record);

    idle = evaluator.used() == used_before ? idle + 1 : 0;
    if (idle >= kMaxIdleIterations) {
      record.stalled = true;
      break;
    }
  }

  record.trace = evaluator.trace();
  record.final_best = state.gbest_f;
  record.evals_used = evaluator.used();
  record.iterations = state.iteration;
  record.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return record;
}

}  // namespace pso
