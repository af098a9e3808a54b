#include "pso/learning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pso {

double cl_learning_probability(std::size_t i, std::size_t n, double alpha, double beta) {
  if (i < 1 || i > n) throw std::out_of_range("learning probability rank outside [1, n]");
  if (n == 1) return alpha;
  // The ratio below is 1 at i = n only up to rounding of the two expm1 calls.
  if (i == n) return alpha + beta;
  const double t = static_cast<double>(i - 1) / static_cast<double>(n - 1);
  return alpha + beta * std::expm1(10.0 * t) / std::expm1(10.0);
}

double dnl_learning_probability(std::size_t i, std::size_t n, double alpha, double beta) {
  if (i < 1 || i > n) throw std::out_of_range("learning probability rank outside [1, n]");
  if (n == 1) return alpha;
  return alpha + beta * static_cast<double>(i - 1) / static_cast<double>(n - 1);
}

std::size_t pbest_tournament(const SwarmState& state, std::size_t a, std::size_t b) {
  return state.particles[a].pbest_f <= state.particles[b].pbest_f ? a : b;
}

std::vector<std::size_t> cl_assign_exemplar(const SwarmState& state, std::size_t i, double p,
                                            RngStream& rng, bool guard,
                                            std::span<const std::size_t> pool) {
  std::vector<std::size_t> others;
  if (pool.empty()) {
    for (std::size_t j = 0; j < state.size(); ++j) {
      if (j != i) others.push_back(j);
    }
  } else {
    for (auto j : pool) {
      if (j != i) others.push_back(j);
    }
  }
  const std::size_t dim = state.dim();
  std::vector<std::size_t> sources(dim, i);
  if (others.empty()) return sources;

  auto winner = [&] {
    const std::size_t a = others[rng.index(others.size())];
    const std::size_t b = others[rng.index(others.size())];
    return pbest_tournament(state, a, b);
  };
  bool all_self = true;
  for (std::size_t d = 0; d < dim; ++d) {
    if (rng.uniform() < p) {
      sources[d] = winner();
      all_self = false;
    }
  }
  if (guard && all_self) {
    const std::size_t d = rng.index(dim);
    sources[d] = winner();
  }
  return sources;
}

Vec exemplar_position(const SwarmState& state, std::span<const std::size_t> sources) {
  Vec e(sources.size());
  for (std::size_t d = 0; d < sources.size(); ++d) e[d] = state.particles[sources[d]].pbest_x[d];
  return e;
}

std::vector<std::size_t> fdr_select_sources(const SwarmState& state, std::size_t i) {
  const auto& self = state.particles[i];
  const double fi = std::isfinite(self.f) ? self.f : self.pbest_f;
  std::vector<std::size_t> sources(state.dim(), i);
  for (std::size_t d = 0; d < state.dim(); ++d) {
    double best = -kInf;
    for (std::size_t j = 0; j < state.size(); ++j) {
      if (j == i) continue;
      const auto& other = state.particles[j];
      const double dist = std::fabs(other.pbest_x[d] - self.x[d]);
      if (dist == 0.0) continue;
      const double ratio = (fi - other.pbest_f) / dist;
      if (ratio > best) {
        best = ratio;
        sources[d] = j;
      }
    }
  }
  return sources;
}

Vec fdr_select_nbest(const SwarmState& state, std::size_t i) {
  return exemplar_position(state, fdr_select_sources(state, i));
}

DlsExemplar dls_build_exemplar(std::span<const double> pbest, double pbest_f,
                               std::span<const double> gbest, const Objective& objective) {
  if (pbest.size() != gbest.size()) throw std::invalid_argument("dls: dimension mismatch");
  DlsExemplar out{Vec(pbest.begin(), pbest.end()), pbest_f, {}, 0};
  Vec trial = out.x;
  for (std::size_t d = 0; d < pbest.size(); ++d) {
    if (gbest[d] == out.x[d]) continue;
    trial[d] = gbest[d];
    const double f = objective(trial);
    ++out.evaluations;
    if (f < out.f) {
      out.x[d] = gbest[d];
      out.f = f;
      out.accepted.push_back(d);
    } else {
      trial[d] = out.x[d];
    }
  }
  return out;
}

std::vector<std::vector<std::uint8_t>> orthogonal_array(std::size_t dim) {
  std::size_t rows = 1;
  while (rows < dim + 1) rows <<= 1;
  std::vector<std::vector<std::uint8_t>> oa(rows, std::vector<std::uint8_t>(dim));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      oa[r][c] = static_cast<std::uint8_t>(std::popcount(r & (c + 1)) & 1);
    }
  }
  return oa;
}

Vec ol_materialize(std::span<const std::uint8_t> levels, std::span<const double> pbest,
                   std::span<const double> nbest) {
  Vec x(levels.size());
  for (std::size_t d = 0; d < levels.size(); ++d) x[d] = levels[d] ? nbest[d] : pbest[d];
  return x;
}

OlGuidance ol_build_guidance(std::span<const double> pbest, double pbest_f,
                             std::span<const double> nbest, const Objective& objective) {
  const std::size_t dim = pbest.size();
  if (nbest.size() != dim) throw std::invalid_argument("ol: dimension mismatch");
  OlGuidance out{std::vector<std::uint8_t>(dim, 0), Vec(pbest.begin(), pbest.end()), pbest_f, 0};
  if (std::equal(pbest.begin(), pbest.end(), nbest.begin())) return out;

  const auto oa = orthogonal_array(dim);
  Vec fit(oa.size());
  std::size_t best_row = 0;
  for (std::size_t r = 0; r < oa.size(); ++r) {
    if (r == 0) {
      fit[r] = pbest_f;  // row 0 is all-pbest
    } else {
      fit[r] = objective(ol_materialize(oa[r], pbest, nbest));
      ++out.evaluations;
    }
    if (fit[r] < fit[best_row]) best_row = r;
  }
  std::vector<std::uint8_t> predicted(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    double sum[2] = {0, 0};
    double count[2] = {0, 0};
    for (std::size_t r = 0; r < oa.size(); ++r) {
      sum[oa[r][c]] += fit[r];
      count[oa[r][c]] += 1;
    }
    predicted[c] = sum[1] / count[1] < sum[0] / count[0] ? 1 : 0;
  }
  out.levels = oa[best_row];
  out.f = fit[best_row];
  const auto tested = std::find(oa.begin(), oa.end(), predicted);
  if (tested == oa.end()) {
    Vec x = ol_materialize(predicted, pbest, nbest);
    const double f = objective(x);
    ++out.evaluations;
    if (f < out.f) {
      out.levels = predicted;
      out.f = f;
    }
  }
  out.x = ol_materialize(out.levels, pbest, nbest);
  return out;
}

std::vector<std::size_t> ring_neighbors(std::size_t i, std::size_t n, std::size_t count) {
  std::vector<std::size_t> out;
  count = std::min(count, n > 0 ? n - 1 : 0);
  for (std::size_t step = 1; out.size() < count; ++step) {
    for (std::size_t j : {(i + step) % n, (i + n - step % n) % n}) {
      if (out.size() < count && j != i && std::find(out.begin(), out.end(), j) == out.end()) {
        out.push_back(j);
      }
    }
  }
  return out;
}

std::size_t ring_best(const SwarmState& state, std::size_t i, std::size_t radius) {
  const std::size_t n = state.size();
  std::vector<std::size_t> members;
  if (2 * radius + 1 >= n) {
    members.resize(n);
    std::iota(members.begin(), members.end(), 0);
  } else {
    for (std::size_t k = 0; k <= 2 * radius; ++k) members.push_back((i + n - radius + k) % n);
    std::sort(members.begin(), members.end());
  }
  std::size_t best = members.front();
  for (auto j : members) {
    if (state.particles[j].pbest_f < state.particles[best].pbest_f) best = j;
  }
  return best;
}

std::vector<std::size_t> nearest_indices(std::span<const Vec> points, std::size_t i,
                                         std::size_t count) {
  std::vector<std::pair<double, std::size_t>> by_dist;
  by_dist.reserve(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (j == i) continue;
    double s = 0.0;
    for (std::size_t d = 0; d < points[i].size(); ++d) {
      s += (points[j][d] - points[i][d]) * (points[j][d] - points[i][d]);
    }
    by_dist.emplace_back(s, j);
  }
  count = std::min(count, by_dist.size());
  std::partial_sort(by_dist.begin(), by_dist.begin() + static_cast<std::ptrdiff_t>(count),
                    by_dist.end());
  std::vector<std::size_t> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = by_dist[k].second;
  return out;
}

std::vector<std::size_t> partition_groups(std::size_t n, std::size_t group_size,
                                          RngStream* shuffle_rng) {
  if (group_size == 0) throw std::invalid_argument("group size must be positive");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (shuffle_rng) shuffle_rng->shuffle(order.begin(), order.end());
  const std::size_t groups = std::max<std::size_t>(1, n / group_size);
  const std::size_t base = n / groups;
  const std::size_t extra = n % groups;
  std::vector<std::size_t> assignment(n);
  std::size_t k = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    for (std::size_t m = 0; m < size; ++m) assignment[order[k++]] = g;
  }
  return assignment;
}

OperatorStats::OperatorStats(double gamma, double alpha_w) : gamma_(gamma), alpha_w_(alpha_w) {
  ratios_.fill(1.0 / kOperators);
}

std::size_t OperatorStats::sample(RngStream& rng) const { return roulette(ratios_, rng); }

void OperatorStats::record(std::size_t k, double parent_f, double child_f) {
  ++uses_.at(k);
  if (child_f < parent_f) {
    ++success_[k];
    prog_[k] += parent_f - child_f;
  }
}

void OperatorStats::update() {
  const double total_prog = std::accumulate(prog_.begin(), prog_.end(), 0.0);
  if (total_prog > 0.0 && std::isfinite(total_prog)) {
    std::array<double, kOperators> reward{};
    double total_reward = 0.0;
    for (std::size_t k = 0; k < kOperators; ++k) {
      const double rate = uses_[k] ? static_cast<double>(success_[k]) / uses_[k] : 0.0;
      const double c = success_[k] > 0 ? 1.0 : 0.0;
      reward[k] = std::exp(alpha_w_ * prog_[k] / total_prog + (1.0 - alpha_w_) * rate) +
                  c * ratios_[k] - 1.0;
      total_reward += reward[k];
    }
    for (std::size_t k = 0; k < kOperators; ++k) {
      ratios_[k] = (1.0 - kOperators * gamma_) * reward[k] / total_reward + gamma_;
    }
  }
  prog_.fill(0.0);
  success_.fill(0);
  uses_.fill(0);
}

SuccessLedger::SuccessLedger(std::size_t members, std::size_t window, double epsilon)
    : members_(members), window_(window), epsilon_(epsilon) {}

void SuccessLedger::begin_generation() {
  success_.emplace_back(members_, 0);
  failure_.emplace_back(members_, 0);
  if (window_ > 0 && success_.size() > window_) {
    success_.pop_front();
    failure_.pop_front();
  }
  ++generations_;
}

void SuccessLedger::record(std::size_t member, bool success) {
  if (success_.empty()) begin_generation();
  (success ? success_ : failure_).back().at(member) += 1;
}

std::vector<double> SuccessLedger::success_rates() const {
  std::vector<double> rates(members_, 0.0);
  for (std::size_t k = 0; k < members_; ++k) {
    double ns = 0, nf = 0;
    for (std::size_t g = 0; g < success_.size(); ++g) {
      ns += static_cast<double>(success_[g][k]);
      nf += static_cast<double>(failure_[g][k]);
    }
    rates[k] = ns / (ns + nf + epsilon_);
  }
  return rates;
}

std::vector<double> SuccessLedger::probabilities() const {
  auto p = success_rates();
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(members_));
  } else {
    for (auto& v : p) v /= total;
  }
  return p;
}

void SuccessLedger::reset() {
  success_.clear();
  failure_.clear();
  generations_ = 0;
}

std::size_t roulette(std::span<const double> weights, RngStream& rng) {
  if (weights.empty()) throw std::invalid_argument("roulette over no weights");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) return rng.index(weights.size());
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last = k;
    if (u < acc) return k;
  }
  return last;
}

}  // namespace pso
