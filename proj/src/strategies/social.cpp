#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"
#include "pso/errors.hpp"
#include "pso/metrics.hpp"
#include "pso/strategies.hpp"

namespace pso {

using detail::as_count;
using detail::inertia_move;

Dms::Dms(StrategySpec spec) : spec_(std::move(spec)) {}

bool Dms::single_swarm(std::size_t n) const { return as_count(spec_.get("subswarm_size")) >= n; }

void Dms::initialize(SwarmState& state, StepContext&, RngStream& rng) {
  const std::size_t n = state.size();
  const auto size = as_count(spec_.get("subswarm_size"));
  if (!single_swarm(n) && n < 2 * size) {
    throw ConfigError("dms: swarm of " + std::to_string(n) + " cannot hold two sub-swarms of " +
                      std::to_string(size));
  }
  state.set_subswarms(partition_groups(n, std::min(size, n), single_swarm(n) ? nullptr : &rng));
}

void Dms::prepare(SwarmState& state, StepContext&, RngStream& rng) {
  const auto period = as_count(spec_.get("regroup_period"));
  if (single_swarm(state.size()) || state.iteration == 0 || state.iteration % period != 0) return;
  state.set_subswarms(partition_groups(state.size(), as_count(spec_.get("subswarm_size")), &rng));
}

Proposal Dms::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const auto& p = state.particles[i];
  const Vec& lbest = state.lbest[state.subswarm_of[i]].x;
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), ctx.progress);
  return inertia_move(p, i, w, {{spec_.get("c1"), p.pbest_x}, {spec_.get("c2"), lbest}},
                      ctx.problem, spec_.get("vmax"), rng);
}

std::optional<std::vector<Vec>> Dms::search_lengths(const SwarmState& state) const {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& p = state.particles[i];
    out.push_back(dms_lengths(p.x, p.pbest_x, state.lbest[state.subswarm_of[i]].x));
  }
  return out;
}

Sl::Sl(StrategySpec spec) : spec_(std::move(spec)) {}

double Sl::learning_probability(std::size_t pos, std::size_t n, std::size_t dim) const {
  const double exponent =
      spec_.get("alpha") * std::log(std::ceil(static_cast<double>(dim) / 100.0));
  if (exponent == 0.0) return 1.0;
  return std::pow(1.0 - static_cast<double>(pos - 1) / static_cast<double>(n), exponent);
}

double Sl::epsilon(std::size_t dim) const {
  return spec_.get("beta") * static_cast<double>(dim) / 100.0;
}

std::vector<Proposal> Sl::step(SwarmState& state, StepContext& ctx, RngStream& rng) {
  const std::size_t n = state.size();
  const std::size_t dim = state.dim();
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return state.particles[a].f > state.particles[b].f;
  });
  position_of_.resize(n);
  for (std::size_t q = 0; q < n; ++q) position_of_[order_[q]] = q;
  mean_.assign(dim, 0.0);
  for (const auto& p : state.particles) {
    for (std::size_t d = 0; d < dim; ++d) mean_[d] += p.x[d];
  }
  for (auto& m : mean_) m /= static_cast<double>(n);
  demonstrator_.resize(n);

  std::vector<Proposal> out;
  for (std::size_t q = 0; q + 1 < n; ++q) {
    const double pl = learning_probability(q + 1, n, dim);
    if (pl < 1.0 && rng.uniform() >= pl) continue;
    out.push_back(propose(state, order_[q], ctx, rng));
  }
  return out;
}

Proposal Sl::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const std::size_t n = state.size();
  const auto& p = state.particles[i];
  const std::size_t q = position_of_.at(i);
  Proposal out{i, p.x, p.vel};
  if (q + 1 >= n) return out;  // the best particle has no demonstrator
  const double eps = epsilon(state.dim());
  auto& demo = demonstrator_[i];
  demo.resize(state.dim());
  for (std::size_t d = 0; d < state.dim(); ++d) {
    const std::size_t k = order_[q + 1 + rng.index(n - q - 1)];
    demo[d] = state.particles[k].x[d];
    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    double v = r1 * p.vel[d] + r2 * (demo[d] - p.x[d]);
    if (eps != 0.0) v += rng.uniform() * eps * (mean_[d] - p.x[d]);
    out.vel[d] = v;
    out.x[d] = p.x[d] + v;
  }
  (void)ctx;
  return out;
}

std::optional<std::vector<Vec>> Sl::search_lengths(const SwarmState& state) const {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& x = state.particles[i].x;
    const bool known = i < demonstrator_.size() && !demonstrator_[i].empty();
    out.push_back(sl_lengths(x, known ? demonstrator_[i] : x, mean_.empty() ? x : mean_));
  }
  return out;
}

Mfl::Mfl(StrategySpec spec) : spec_(std::move(spec)) {}

double Mfl::forgetting(const SwarmState& state, std::span<const double> x,
                       const Problem& problem) const {
  double dist = 0.0, span = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    dist += (x[d] - state.gbest_x[d]) * (x[d] - state.gbest_x[d]);
    span += (problem.upper[d] - problem.lower[d]) * (problem.upper[d] - problem.lower[d]);
  }
  return std::min(0.9, spec_.get("slope") * std::sqrt(dist) / std::sqrt(span));
}

Proposal Mfl::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const std::size_t n = state.size();
  if (fg_.size() != n) {
    fg_.assign(n, 0.0);
    lbest_.assign(n, 0);
  }
  const auto& p = state.particles[i];
  const auto ring = as_count(spec_.get("ring_size"));
  const std::size_t radius = ring >= n ? n : (ring - 1) / 2;
  lbest_[i] = ring_best(state, i, radius);
  fg_[i] = forgetting(state, p.x, ctx.problem);
  const double keep = 1.0 - fg_[i];
  const Vec& l = state.particles[lbest_[i]].pbest_x;
  Vec lt(l.size()), gt(l.size());
  for (std::size_t d = 0; d < l.size(); ++d) {
    lt[d] = keep * l[d];
    gt[d] = keep * state.gbest_x[d];
  }
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), ctx.progress);
  return inertia_move(p, i, w,
                      {{spec_.get("c1"), p.pbest_x}, {spec_.get("c2"), lt},
                       {spec_.get("c3"), gt}},
                      ctx.problem, spec_.get("vmax"), rng);
}

std::optional<std::vector<Vec>> Mfl::search_lengths(const SwarmState& state) const {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& p = state.particles[i];
    const double fg = i < fg_.size() ? fg_[i] : 0.0;
    const std::size_t l = i < lbest_.size() ? lbest_[i] : i;
    out.push_back(mfl_lengths(p.x, p.pbest_x, state.particles[l].pbest_x, state.gbest_x,
                              Vec(p.x.size(), fg)));
  }
  return out;
}

Al::Al(StrategySpec spec)
    : spec_(std::move(spec)), stats_(spec_.get("gamma"), spec_.get("alpha_w")) {}

void Al::prepare(SwarmState& state, StepContext&, RngStream&) {
  const std::size_t n = state.size();
  vel_avg_.assign(state.dim(), 0.0);
  for (const auto& p : state.particles) {
    for (std::size_t d = 0; d < state.dim(); ++d) vel_avg_[d] += std::fabs(p.vel[d]);
  }
  for (auto& v : vel_avg_) v /= static_cast<double>(n);
  op_.resize(n);
  parent_f_.resize(n);
  selected_.resize(n);
}

Proposal Al::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const auto& p = state.particles[i];
  const std::size_t k = stats_.sample(rng);
  op_[i] = k;
  parent_f_[i] = std::isfinite(p.f) ? p.f : p.pbest_f;
  if (k == random) {
    Proposal out{i, p.x, p.vel};
    selected_[i] = p.x;
    for (std::size_t d = 0; d < p.x.size(); ++d) {
      out.x[d] = p.x[d] + vel_avg_[d] * rng.normal();
      selected_[i][d] += vel_avg_[d];
    }
    return out;
  }
  const Vec* target = &p.pbest_x;
  if (k == global) {
    target = &state.gbest_x;
  } else if (k == neighbor) {
    std::size_t best = i;
    double best_d = kInf;
    for (std::size_t j = 0; j < state.size(); ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (std::size_t d = 0; d < p.x.size(); ++d) {
        s += (state.particles[j].x[d] - p.x[d]) * (state.particles[j].x[d] - p.x[d]);
      }
      if (s < best_d) {
        best_d = s;
        best = j;
      }
    }
    target = &state.particles[best].pbest_x;
  }
  selected_[i] = *target;
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), ctx.progress);
  return inertia_move(p, i, w, {{spec_.get("eta"), *target}}, ctx.problem, spec_.get("vmax"),
                      rng);
}

void Al::observe(SwarmState&, std::span<const Outcome> outcomes, StepContext&) {
  for (const auto& o : outcomes) stats_.record(op_[o.index], parent_f_[o.index], o.f);
  ++generation_;
  if (generation_ % as_count(spec_.get("update_period")) == 0) stats_.update();
}

std::optional<std::vector<Vec>> Al::search_lengths(const SwarmState& state) const {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& x = state.particles[i].x;
    const bool known = i < selected_.size() && !selected_[i].empty();
    out.push_back(al_lengths(x, known ? selected_[i] : x));
  }
  return out;
}

Mal::Mal(StrategySpec spec) : spec_(std::move(spec)) {}

void Mal::prepare(SwarmState& state, StepContext&, RngStream&) {
  const std::size_t n = state.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double fa = state.particles[a].pbest_f, fb = state.particles[b].pbest_f;
    if (fa != fb) return fa < fb;
    return (a == state.gbest_index) && (b != state.gbest_index);
  });
  const std::size_t groups = std::min(as_count(spec_.get("groups")), n);
  const std::size_t base = n / groups, extra = n % groups;
  bands_.assign(groups, {});
  band_of_.resize(n);
  rank_in_band_.resize(n);
  std::size_t k = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    for (std::size_t m = 0; m < size; ++m, ++k) {
      bands_[g].push_back(order[k]);
      band_of_[order[k]] = g;
      rank_in_band_[order[k]] = m;
    }
  }
}

Proposal Mal::propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) {
  const auto& p = state.particles[i];
  const auto& band = bands_.at(band_of_.at(i));
  const std::size_t q = rank_in_band_[i];
  const Vec& e1 = state.particles[band.front()].pbest_x;
  const std::size_t pool = q == 0 ? band.size() : q;
  const Vec& e2 = state.particles[band[rng.index(pool)]].pbest_x;
  const double w = schedule(spec_.get("w_start"), spec_.get("w_end"), ctx.progress);
  return inertia_move(p, i, w, {{1.0, e1}, {1.0, e2}}, ctx.problem, spec_.get("vmax"), rng);
}

}  // namespace pso
