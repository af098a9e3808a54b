#include <algorithm>
#include <bit>
#include <cmath>

#include "common.hpp"
#include "pso/errors.hpp"
#include "pso/metrics.hpp"
#include "pso/strategies.hpp"

namespace pso {

using detail::as_count;
using detail::inertia_move;

namespace {

Objective untracked(Evaluator& evaluator) {
  return [&evaluator](std::span<const double> x) {
    return evaluator(x, Evaluator::Track::none);
  };
}

}  // namespace

Cl::Cl(StrategySpec spec) : spec_(std::move(spec)) {}

Proposal Cl::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const std::size_t n = state.size();
  if (sources_.size() != n) {
    sources_.assign(n, {});
    rebuilds_.assign(n, 0);
  }
  auto& p = state.particles[i];
  if (sources_[i].empty() || p.stall > static_cast<int>(spec_.get("refresh_gap"))) {
    const double prob =
        cl_learning_probability(i + 1, n, spec_.get("alpha"), spec_.get("beta"));
    sources_[i] = cl_assign_exemplar(state, i, prob, rng, spec_.get("guard") != 0);
    p.stall = 0;
    ++rebuilds_[i];
  }
  const Vec exemplar = exemplar_position(state, sources_[i]);
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), ctx.progress);
  return inertia_move(p, i, w, {{spec_.get("c"), exemplar}}, ctx.problem, spec_.get("vmax"),
                      rng);
}

std::optional<std::vector<Vec>> Cl::search_lengths(const SwarmState& state) const {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& x = state.particles[i].x;
    out.push_back(i < sources_.size() && !sources_[i].empty()
                      ? cl_lengths(x, exemplar_position(state, sources_[i]))
                      : Vec(x.size(), 0.0));
  }
  return out;
}

Dnl::Dnl(StrategySpec spec) : spec_(std::move(spec)) {}

void Dnl::initialize(SwarmState& state, StepContext&, RngStream& rng) {
  const std::size_t n = state.size();
  if (spec_.kind == StrategyKind::cl_gbest) {
    group_size_ = n;
  } else {
    const auto size = as_count(spec_.get("neighborhood_size"));
    group_size_ = size == 0 ? (n + 4) / 5 : std::min(size, n);
  }
  sources_.assign(n, {});
  regroup(n, rng);
}

void Dnl::regroup(std::size_t n, RngStream& rng) {
  const bool single = n / group_size_ <= 1;
  group_of_ = partition_groups(n, group_size_, single ? nullptr : &rng);
  std::size_t groups = 0;
  for (auto g : group_of_) groups = std::max(groups, g + 1);
  members_.assign(groups, {});
  for (std::size_t i = 0; i < n; ++i) members_[group_of_[i]].push_back(i);
}

void Dnl::prepare(SwarmState& state, StepContext& ctx, RngStream& rng) {
  if (group_of_.size() != state.size()) initialize(state, ctx, rng);
  if (members_.size() <= 1 || state.iteration == 0) return;
  if (state.iteration % as_count(spec_.get("regroup_period")) == 0) regroup(state.size(), rng);
}

Proposal Dnl::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const std::size_t n = state.size();
  auto& p = state.particles[i];
  if (sources_[i].empty() || p.stall > static_cast<int>(spec_.get("refresh_gap"))) {
    const double alpha = spec_.get("alpha"), beta = spec_.get("beta");
    const double prob = spec_.get("prob_form") != 0
                            ? cl_learning_probability(i + 1, n, alpha, beta)
                            : dnl_learning_probability(i + 1, n, alpha, beta);
    const auto& pool = members_[group_of_[i]];
    sources_[i] = cl_assign_exemplar(state, i, prob, rng, spec_.get("guard") != 0,
                                     members_.size() > 1 ? std::span<const std::size_t>(pool)
                                                         : std::span<const std::size_t>());
    p.stall = 0;
  }
  const Vec exemplar = exemplar_position(state, sources_[i]);
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), ctx.progress);
  return inertia_move(p, i, w, {{spec_.get("c1"), exemplar}, {spec_.get("c2"), state.gbest_x}},
                      ctx.problem, spec_.get("vmax"), rng);
}

std::optional<std::vector<Vec>> Dnl::search_lengths(const SwarmState& state) const {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& x = state.particles[i].x;
    const Vec e = i < sources_.size() && !sources_[i].empty()
                      ? exemplar_position(state, sources_[i])
                      : state.particles[i].pbest_x;
    out.push_back(dnl_lengths(x, e, state.gbest_x));
  }
  return out;
}

Dls::Dls(StrategySpec spec) : spec_(std::move(spec)) {}

void Dls::prepare(SwarmState& state, StepContext& ctx, RngStream&) {
  const std::size_t n = state.size();
  if (cache_.size() != n) cache_.assign(n, Cache{});
  const auto objective = untracked(ctx.evaluator);
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = cache_[i];
    const auto& p = state.particles[i];
    const bool stale = !c.built || c.pbest_f != p.pbest_f || c.gbest != state.gbest_x;
    if (!stale || ctx.evaluator.remaining() < state.dim()) continue;
    c.exemplar = dls_build_exemplar(p.pbest_x, p.pbest_f, state.gbest_x, objective);
    c.pbest_f = p.pbest_f;
    c.gbest = state.gbest_x;
    c.built = true;
    ++builds_;
  }
}

Proposal Dls::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const auto& p = state.particles[i];
  const Vec& target = cache_.at(i).built ? cache_[i].exemplar.x : p.pbest_x;
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), ctx.progress);
  return inertia_move(p, i, w, {{spec_.get("c1"), target}, {spec_.get("c2"), state.gbest_x}},
                      ctx.problem, spec_.get("vmax"), rng);
}

Ol::Ol(StrategySpec spec) : spec_(std::move(spec)) {}

Proposal Ol::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const std::size_t n = state.size();
  if (guides_.size() != n) {
    guides_.assign(n, Guide{});
    rebuilds_.assign(n, 0);
  }
  auto& p = state.particles[i];
  auto& guide = guides_[i];
  const std::size_t rows = std::bit_ceil(state.dim() + 1);
  const bool due = !guide.built || p.stall >= static_cast<int>(spec_.get("stall_trigger"));
  if (due && ctx.evaluator.remaining() >= rows) {
    const std::size_t j = ring_best(state, i, as_count(spec_.get("radius")));
    const auto g = ol_build_guidance(p.pbest_x, p.pbest_f, state.particles[j].pbest_x,
                                     untracked(ctx.evaluator));
    guide = {g.levels, j, true};
    p.stall = 0;
    ++rebuilds_[i];
  }
  const Vec target = guide.built
                         ? ol_materialize(guide.levels, p.pbest_x,
                                          state.particles[guide.source].pbest_x)
                         : p.pbest_x;
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), ctx.progress);
  return inertia_move(p, i, w, {{spec_.get("c"), target}}, ctx.problem, spec_.get("vmax"), rng);
}

}  // namespace pso
