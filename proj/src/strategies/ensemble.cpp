#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "pso/errors.hpp"
#include "pso/strategies.hpp"

namespace pso {

using detail::as_count;

namespace {

std::size_t fraction_of(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace

Ensemble::Ensemble(std::vector<StrategyKind> members, std::size_t elite_member)
    : elite_member_(elite_member) {
  for (auto k : members) members_.push_back(make_strategy(default_spec(k)));
}

void Ensemble::initialize(SwarmState& state, StepContext& ctx, RngStream& rng) {
  elite_ = elite_count(state.size());
  assignment_.assign(state.size(), elite_member_);
  for (auto& m : members_) m->initialize(state, ctx, rng);
}

std::vector<Proposal> Ensemble::step(SwarmState& state, StepContext& ctx, RngStream& rng) {
  for (auto& m : members_) m->prepare(state, ctx, rng);
  assign(state, ctx, rng);
  std::vector<Proposal> out;
  out.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    out.push_back(members_[assignment_[i]]->propose(state, i, ctx, rng));
  }
  return out;
}

Proposal Ensemble::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  return members_[assignment_.at(i)]->propose(state, i, ctx, rng);
}

void Ensemble::observe(SwarmState& state, std::span<const Outcome> outcomes, StepContext& ctx) {
  for (const auto& o : outcomes) {
    if (o.index >= elite_) record(assignment_[o.index], o.improved);
  }
  for (auto& m : members_) m->observe(state, outcomes, ctx);
}

Epso::Epso(StrategySpec spec)
    : Ensemble({StrategyKind::cl_gbest, StrategyKind::pso_ldw, StrategyKind::lips,
                StrategyKind::pso_tvac, StrategyKind::fdr},
               0),
      spec_(std::move(spec)),
      ledger_(5, as_count(spec_.get("learning_period")), spec_.get("epsilon")) {}

std::size_t Epso::elite_count(std::size_t n) const {
  return fraction_of(spec_.get("elite_fraction"), n);
}

std::vector<double> Epso::probabilities() const {
  if (ledger_.generations() < as_count(spec_.get("learning_period"))) {
    return std::vector<double>(member_count(), 1.0 / static_cast<double>(member_count()));
  }
  return ledger_.probabilities();
}

void Epso::assign(SwarmState& state, StepContext&, RngStream& rng) {
  const auto p = probabilities();
  ledger_.begin_generation();
  if (spec_.get("per_group_assignment") != 0) {
    const std::size_t k = roulette(p, rng);
    for (std::size_t i = elite_; i < state.size(); ++i) assignment_[i] = k;
    return;
  }
  for (std::size_t i = elite_; i < state.size(); ++i) assignment_[i] = roulette(p, rng);
}

void Epso::record(std::size_t member, bool success) { ledger_.record(member, success); }

Sdl::Sdl(StrategySpec spec)
    : Ensemble({StrategyKind::cl, StrategyKind::upso, StrategyKind::pso_ldw, StrategyKind::lips},
               0),
      spec_(std::move(spec)),
      ledger_(4, 0, spec_.get("epsilon")) {}

std::size_t Sdl::elite_count(std::size_t n) const {
  return fraction_of(spec_.get("cl_fraction"), n);
}

std::vector<double> Sdl::probabilities() const { return ledger_.probabilities(); }

void Sdl::assign(SwarmState& state, StepContext& ctx, RngStream& rng) {
  const auto stages = as_count(spec_.get("stages"));
  const auto stage = std::min(
      stages - 1, static_cast<std::size_t>(std::floor(ctx.progress * static_cast<double>(stages))));
  if (stage != stage_) {
    ledger_.reset();
    stage_ = stage;
  }
  ledger_.begin_generation();
  const double fixed = spec_.get("fixed_member");
  if (fixed >= 0) {
    for (std::size_t i = elite_; i < state.size(); ++i) assignment_[i] = as_count(fixed);
    return;
  }
  const auto p = probabilities();
  for (std::size_t i = elite_; i < state.size(); ++i) assignment_[i] = roulette(p, rng);
}

void Sdl::record(std::size_t member, bool success) { ledger_.record(member, success); }

std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec) {
  validate_spec(spec);
  switch (spec.kind) {
    case StrategyKind::pso_ldw:
    case StrategyKind::pso_tvac: return std::make_unique<InertiaPso>(spec);
    case StrategyKind::constriction: return std::make_unique<Constriction>(spec);
    case StrategyKind::fips: return std::make_unique<Fips>(spec);
    case StrategyKind::lips: return std::make_unique<Lips>(spec);
    case StrategyKind::cl: return std::make_unique<Cl>(spec);
    case StrategyKind::cl_gbest:
    case StrategyKind::dnl: return std::make_unique<Dnl>(spec);
    case StrategyKind::fdr: return std::make_unique<Fdr>(spec);
    case StrategyKind::dls: return std::make_unique<Dls>(spec);
    case StrategyKind::dms: return std::make_unique<Dms>(spec);
    case StrategyKind::sl: return std::make_unique<Sl>(spec);
    case StrategyKind::mfl: return std::make_unique<Mfl>(spec);
    case StrategyKind::al: return std::make_unique<Al>(spec);
    case StrategyKind::mal: return std::make_unique<Mal>(spec);
    case StrategyKind::upso: return std::make_unique<Upso>(spec);
    case StrategyKind::epso: return std::make_unique<Epso>(spec);
    case StrategyKind::sdl: return std::make_unique<Sdl>(spec);
    case StrategyKind::ol: return std::make_unique<Ol>(spec);
  }
  throw ConfigError("unknown strategy kind");
}

}  // namespace pso
