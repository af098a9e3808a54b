#include <algorithm>
#include <numeric>

#include "common.hpp"
#include "pso/errors.hpp"
#include "pso/kernels.hpp"
#include "pso/metrics.hpp"
#include "pso/strategies.hpp"

namespace pso {

using detail::as_count;
using detail::draw;
using detail::inertia_move;

InertiaPso::InertiaPso(StrategySpec spec) : spec_(std::move(spec)) {}

Proposal InertiaPso::propose(SwarmState& state, std::size_t i, StepContext& ctx,
                             RngStream& rng) {
  const auto& p = state.particles[i];
  const double t = ctx.progress;
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), t);
  double c1, c2;
  if (spec_.kind == StrategyKind::pso_tvac) {
    c1 = schedule(spec_.get("c1_start"), spec_.get("c1_end"), t);
    c2 = schedule(spec_.get("c2_start"), spec_.get("c2_end"), t);
  } else {
    c1 = spec_.get("c1");
    c2 = spec_.get("c2");
  }
  return inertia_move(p, i, w, {{c1, p.pbest_x}, {c2, state.gbest_x}}, ctx.problem,
                      spec_.get("vmax"), rng);
}

Constriction::Constriction(StrategySpec spec)
    : spec_(std::move(spec)), chi_(constriction_chi(spec_.get("c1") + spec_.get("c2"))) {}

Proposal Constriction::propose(SwarmState& state, std::size_t i, StepContext& ctx,
                               RngStream& rng) {
  const auto& p = state.particles[i];
  const Vec& target = spec_.get("target") == 0
                          ? state.gbest_x
                          : state.particles[ring_best(state, i, as_count(spec_.get("radius")))]
                                .pbest_x;
  const double c1 = spec_.get("c1"), c2 = spec_.get("c2");
  Proposal out{i, p.x, p.vel};
  if (spec_.get("stochastic") != 0) {
    for (std::size_t d = 0; d < p.x.size(); ++d) {
      const double r1 = draw(c1, rng);
      const double r2 = draw(c2, rng);
      out.vel[d] = chi_ * (p.vel[d] + c1 * r1 * (p.pbest_x[d] - p.x[d]) +
                           c2 * r2 * (target[d] - p.x[d]));
    }
  } else {
    const double c = c1 + c2;
    for (std::size_t d = 0; d < p.x.size(); ++d) {
      const double pbar = (c1 * p.pbest_x[d] + c2 * target[d]) / c;
      out.vel[d] = chi_ * (p.vel[d] + c * (pbar - p.x[d]));
    }
  }
  detail::advance(out, p, ctx.problem, spec_.get("vmax"));
  return out;
}

Upso::Upso(StrategySpec spec)
    : spec_(std::move(spec)), chi_(constriction_chi(spec_.get("c1") + spec_.get("c2"))) {}

Proposal Upso::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const auto& p = state.particles[i];
  const double u = spec_.get("u");
  const double c1 = spec_.get("c1"), c2 = spec_.get("c2");
  const Vec& lbest =
      state.particles[ring_best(state, i, as_count(spec_.get("radius")))].pbest_x;
  Proposal out{i, p.x, p.vel};
  for (std::size_t d = 0; d < p.x.size(); ++d) {
    double g = 0.0, l = 0.0;
    if (u != 0.0) {
      const double r1 = draw(c1, rng);
      const double r2 = draw(c2, rng);
      g = chi_ * (p.vel[d] + c1 * r1 * (p.pbest_x[d] - p.x[d]) +
                  c2 * r2 * (state.gbest_x[d] - p.x[d]));
    }
    if (u != 1.0) {
      const double r3 = draw(c1, rng);
      const double r4 = draw(c2, rng);
      l = chi_ * (p.vel[d] + c1 * r3 * (p.pbest_x[d] - p.x[d]) + c2 * r4 * (lbest[d] - p.x[d]));
    }
    out.vel[d] = u == 1.0 ? g : u == 0.0 ? l : u * g + (1.0 - u) * l;
  }
  detail::advance(out, p, ctx.problem, spec_.get("vmax"));
  return out;
}

namespace {

/// chi (vel + phi (pbar - x)) for a weighted attractor.
Proposal informed_move(const Particle& p, std::size_t i, double chi, double phi, const Vec& pbar,
                       const Problem& problem, double vmax) {
  Proposal out{i, p.x, p.vel};
  for (std::size_t d = 0; d < p.x.size(); ++d) {
    out.vel[d] = chi * (p.vel[d] + phi * (pbar[d] - p.x[d]));
  }
  detail::advance(out, p, problem, vmax);
  return out;
}

/// sum_k w_k y_k / sum_k w_k; plain mean when every weight is zero. Written
/// as an offset from the first point so coincident points are reproduced exactly.
Vec weighted_mean(const SwarmState& state, std::span<const std::size_t> who,
                  std::span<const double> weights) {
  const Vec& base = state.particles[who[0]].pbest_x;
  Vec out = base;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double n = static_cast<double>(who.size());
  for (std::size_t k = 1; k < who.size(); ++k) {
    const double share = total > 0.0 ? weights[k] / total : 1.0 / n;
    const auto& y = state.particles[who[k]].pbest_x;
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += share * (y[d] - base[d]);
  }
  return out;
}

}  // namespace

Fips::Fips(StrategySpec spec)
    : spec_(std::move(spec)), chi_(constriction_chi(spec_.get("c_max"))) {}

void Fips::initialize(SwarmState& state, StepContext&, RngStream&) {
  if (ring_neighbors(0, state.size(), as_count(spec_.get("n_g"))).empty()) {
    throw ConfigError("fips: empty neighbourhood");
  }
  pbar_.assign(state.size(), Vec{});
}

Proposal Fips::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const auto who = ring_neighbors(i, state.size(), as_count(spec_.get("n_g")));
  const double cap = spec_.get("c_max") / static_cast<double>(who.size());
  Vec weights(who.size());
  for (auto& w : weights) w = rng.uniform(0.0, cap);
  if (pbar_.size() != state.size()) pbar_.assign(state.size(), Vec{});
  pbar_[i] = weighted_mean(state, who, weights);
  const double phi = std::accumulate(weights.begin(), weights.end(), 0.0);
  return informed_move(state.particles[i], i, chi_, phi, pbar_[i], ctx.problem,
                       spec_.get("vmax"));
}

Lips::Lips(StrategySpec spec)
    : spec_(std::move(spec)), chi_(constriction_chi(spec_.get("c_max"))) {}

void Lips::initialize(SwarmState& state, StepContext&, RngStream&) {
  const auto ng = as_count(spec_.get("n_g"));
  if (state.size() < ng + 1) {
    throw ConfigError("lips: swarm of " + std::to_string(state.size()) +
                      " is smaller than n_g + 1 = " + std::to_string(ng + 1));
  }
  neighbors_.assign(state.size(), {});
  pbar_.assign(state.size(), Vec{});
}

void Lips::prepare(SwarmState& state, StepContext&, RngStream&) {
  const std::size_t n = state.size();
  const auto ng = as_count(spec_.get("n_g"));
  if (n < ng + 1) throw ConfigError("lips: swarm is smaller than n_g + 1");
  neighbors_.resize(n);
  pbar_.resize(n);
  std::vector<Vec> pbests(n);
  for (std::size_t i = 0; i < n; ++i) pbests[i] = state.particles[i].pbest_x;
  const auto dist = kernels::pairwise_sq_distances(pbests, kernels::Exec::serial);
  std::vector<std::pair<double, std::size_t>> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.emplace_back(dist[i * n + j], j);
    }
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(ng), row.end());
    neighbors_[i].resize(ng);
    for (std::size_t k = 0; k < ng; ++k) neighbors_[i][k] = row[k].second;
  }
}

Proposal Lips::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const auto& who = neighbors_.at(i);
  const double cap = spec_.get("c_max") / static_cast<double>(who.size());
  Vec weights(who.size());
  for (auto& w : weights) w = rng.uniform(0.0, cap);
  pbar_[i] = weighted_mean(state, who, weights);
  return informed_move(state.particles[i], i, chi_, spec_.get("c_max"), pbar_[i], ctx.problem,
                       spec_.get("vmax"));
}

std::optional<std::vector<Vec>> Lips::search_lengths(const SwarmState& state) const {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& x = state.particles[i].x;
    out.push_back(lis_lengths(x, pbar_[i].empty() ? x : pbar_[i]));
  }
  return out;
}

Fdr::Fdr(StrategySpec spec) : spec_(std::move(spec)) {}

Proposal Fdr::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const auto& p = state.particles[i];
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), ctx.progress);
  const double w3 = spec_.get("w3");
  const Vec nbest = w3 != 0.0 ? fdr_select_nbest(state, i) : p.pbest_x;
  return inertia_move(p, i, w,
                      {{spec_.get("w1"), p.pbest_x}, {spec_.get("w2"), state.gbest_x},
                       {w3, nbest}},
                      ctx.problem, spec_.get("vmax"), rng);
}

}  // namespace pso
