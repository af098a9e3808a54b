#pragma once

// Exemplar construction and adaptive-selection machinery shared by the
// strategies.

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "pso/problem.hpp"
#include "pso/rng.hpp"
#include "pso/swarm.hpp"

namespace pso {

// ---------------------------------------------------------------------------
// Comprehensive learning

/// Exponential learning probability for particle rank i in [1, n]:
/// alpha + beta * (exp(10 (i-1)/(n-1)) - 1) / (exp(10) - 1).
double cl_learning_probability(std::size_t i, std::size_t n, double alpha, double beta);

/// Linear counterpart: alpha + beta * (i-1)/(n-1).
double dnl_learning_probability(std::size_t i, std::size_t n, double alpha, double beta);

/// Fitter of two pbest memories; a wins ties.
std::size_t pbest_tournament(const SwarmState& state, std::size_t a, std::size_t b);

/// Per-dimension exemplar sources (particle indices) for particle i. Each
/// dimension learns from a tournament winner among `pool` (i excluded) with
/// probability p, else from i itself. With `guard` set, an all-self row gets
/// one random dimension forced to a tournament winner. An empty pool means
/// the whole swarm.
std::vector<std::size_t> cl_assign_exemplar(const SwarmState& state, std::size_t i, double p,
                                            RngStream& rng, bool guard = true,
                                            std::span<const std::size_t> pool = {});

/// Materializes an exemplar from per-dimension sources using current pbests.
Vec exemplar_position(const SwarmState& state, std::span<const std::size_t> sources);

// ---------------------------------------------------------------------------
// Fitness-distance ratio

/// Per dimension, the source j != i maximizing
/// (f(x_i) - f(pbest_j)) / |pbest_j[d] - x_i[d]|; zero-distance candidates
/// are skipped and the lowest index wins ties. Dimensions without a
/// candidate fall back to i's own pbest. f(x_i) falls back to pbest_f when
/// the particle's current fitness is unknown.
std::vector<std::size_t> fdr_select_sources(const SwarmState& state, std::size_t i);
Vec fdr_select_nbest(const SwarmState& state, std::size_t i);

// ---------------------------------------------------------------------------
// Dimensional learning

struct DlsExemplar {
  Vec x;
  double f = kInf;
  std::vector<std::size_t> accepted;  // dimensions copied from gbest
  std::size_t evaluations = 0;
};

/// Greedy per-dimension scan: copy gbest[d] into the exemplar when that
/// strictly improves fitness; dimensions already equal are skipped without
/// evaluation. Result fitness <= pbest_f.
DlsExemplar dls_build_exemplar(std::span<const double> pbest, double pbest_f,
                               std::span<const double> gbest, const Objective& objective);

// ---------------------------------------------------------------------------
// Orthogonal learning

/// Two-level orthogonal array with M = 2^ceil(log2(dim+1)) rows and `dim`
/// columns; entry (r, c) = parity(popcount(r & (c+1))). Level 0 picks the
/// first factor source, level 1 the second.
std::vector<std::vector<std::uint8_t>> orthogonal_array(std::size_t dim);

struct OlGuidance {
  std::vector<std::uint8_t> levels;  // 0 = pbest, 1 = nbest
  Vec x;
  double f = kInf;
  std::size_t evaluations = 0;
};

/// Tests every array row, predicts the per-factor best level from mean
/// fitness, and keeps the better of (best row, prediction). Identical inputs
/// return pbest without evaluating. `pbest_f` is reused for the all-pbest row.
OlGuidance ol_build_guidance(std::span<const double> pbest, double pbest_f,
                             std::span<const double> nbest, const Objective& objective);

Vec ol_materialize(std::span<const std::uint8_t> levels, std::span<const double> pbest,
                   std::span<const double> nbest);

// ---------------------------------------------------------------------------
// Topologies

/// `count` ring neighbours of i, alternating i+1, i-1, i+2, i-2, ...
/// (self excluded).
std::vector<std::size_t> ring_neighbors(std::size_t i, std::size_t n, std::size_t count);

/// Index of the best pbest in the closed ring {i-radius, ..., i+radius};
/// lowest index wins ties.
std::size_t ring_best(const SwarmState& state, std::size_t i, std::size_t radius);

/// The `count` points nearest to points[i] (i excluded) by Euclidean
/// distance, nearest first, lowest index on ties.
std::vector<std::size_t> nearest_indices(std::span<const Vec> points, std::size_t i,
                                         std::size_t count);

/// Partition of [0, n) into contiguous-size groups after an optional
/// shuffle; the remainder is spread one per group from the first group.
std::vector<std::size_t> partition_groups(std::size_t n, std::size_t group_size,
                                          RngStream* shuffle_rng);

// ---------------------------------------------------------------------------
// Adaptive operator selection (AL)

class OperatorStats {
 public:
  static constexpr std::size_t kOperators = 4;  // self, neighbor, random, global

  explicit OperatorStats(double gamma = 0.01, double alpha_w = 0.5);

  std::span<const double> ratios() const { return ratios_; }
  std::size_t sample(RngStream& rng) const;
  /// parent_f and child_f of one application of operator k.
  void record(std::size_t k, double parent_f, double child_f);
  /// Reward-based ratio update; resets the counters. Keeps the previous
  /// ratios when no operator made progress.
  void update();

  std::span<const double> progress() const { return prog_; }
  std::span<const std::size_t> successes() const { return success_; }
  std::span<const std::size_t> uses() const { return uses_; }

 private:
  double gamma_;
  double alpha_w_;
  std::array<double, kOperators> ratios_;
  std::array<double, kOperators> prog_{};
  std::array<std::size_t, kOperators> success_{};
  std::array<std::size_t, kOperators> uses_{};
};

// ---------------------------------------------------------------------------
// Success ledgers for strategy ensembles (EPSO, SDL)

/// Per-generation success/failure counts over a sliding window of
/// generations; window 0 keeps everything until reset().
class SuccessLedger {
 public:
  SuccessLedger(std::size_t members, std::size_t window, double epsilon = 0.01);

  void begin_generation();
  void record(std::size_t member, bool success);
  /// Generations recorded so far (since construction or reset).
  std::size_t generations() const { return generations_; }
  /// S_k = sum n_s / (sum (n_s + n_f) + epsilon) over the window.
  std::vector<double> success_rates() const;
  /// p_k = S_k / sum S_k; uniform when every S_k is zero.
  std::vector<double> probabilities() const;
  void reset();

 private:
  std::size_t members_;
  std::size_t window_;
  double epsilon_;
  std::size_t generations_ = 0;
  std::deque<std::vector<std::size_t>> success_;
  std::deque<std::vector<std::size_t>> failure_;
};

/// Roulette-wheel draw over non-negative weights.
std::size_t roulette(std::span<const double> weights, RngStream& rng);

}  // namespace pso
