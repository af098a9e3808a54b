#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pso/optimizer.hpp"
#include "pso/problem.hpp"

namespace pso {

/// Mean Euclidean distance of the positions from their centroid.
double population_diversity(std::span<const Vec> positions);

// ---------------------------------------------------------------------------
// Potential search-space volume

struct VolumeSummary {
  Vec log_volume;               // per particle: sum_d ln r_d (-inf if some r_d == 0)
  double log_mean_volume = 0;   // ln(mean_i exp(log_volume_i)), via log-sum-exp
  double mean_volume = 0;       // exp(log_mean_volume); may under/overflow
  bool representable = true;    // mean_volume is finite and non-zero (or all volumes 0)
};

/// lengths: rows = particles, columns = dimensions. Negative lengths throw
/// std::invalid_argument.
VolumeSummary potential_volume(std::span<const Vec> lengths);

// Per-dimension attraction spans, one function per strategy family.
Vec al_lengths(std::span<const double> x, std::span<const double> selected_best);
Vec cl_lengths(std::span<const double> x, std::span<const double> exemplar);
Vec sl_lengths(std::span<const double> x, std::span<const double> demonstrator,
               std::span<const double> mean);
Vec lis_lengths(std::span<const double> x, std::span<const double> pbar);
Vec dnl_lengths(std::span<const double> x, std::span<const double> exemplar,
                std::span<const double> gbest);
Vec dms_lengths(std::span<const double> x, std::span<const double> pbest,
                std::span<const double> lbest);
Vec mfl_lengths(std::span<const double> x, std::span<const double> pbest,
                std::span<const double> lbest, std::span<const double> gbest,
                std::span<const double> forgetting);

// ---------------------------------------------------------------------------
// Performance index

/// Results of one strategy on one problem.
struct ProblemStats {
  double successes = 0;  // SR
  double runs = 0;       // TR
  double avg_time = 0;   // AT
  double avg_fitness = 0;  // AF (error to the optimum, >= 0)
};

/// Minima over all strategies for one problem.
struct ProblemMins {
  double min_time = 0;     // MT
  double min_fitness = 0;  // MF
};

struct PiWeights {
  double k1 = 1.0 / 3;
  double k2 = 1.0 / 3;
  double k3 = 1.0 / 3;
};

/// Weighting case 1, 2 or 3: the case's own weight is omega, the other two
/// share 1 - omega equally.
PiWeights pi_case(int which, double omega);

/// Mean over problems of k1 SR/TR + k2 MT/AT + k3 MF/AF. A 0/0 ratio counts
/// as 1 (the strategy attains the minimum). Throws std::invalid_argument when
/// the weights do not sum to 1 or the spans differ in length.
double performance_index(std::span<const ProblemStats> results, std::span<const ProblemMins> mins,
                         PiWeights weights);

// ---------------------------------------------------------------------------
// AvgRanks

/// `points` evaluation counts geometrically spaced over [first, last],
/// rounded to integers, strictly increasing.
std::vector<std::size_t> geometric_grid(std::size_t first, std::size_t last, std::size_t points);

/// traces[s][k]: best-so-far trace of strategy s on instance k (a
/// problem/run pair). Returns mean rank per strategy per grid point
/// (ties share the average rank). Throws std::invalid_argument on an empty
/// or ragged trace set.
std::vector<Vec> avg_ranks_trace(const std::vector<std::vector<Trace>>& traces,
                                 std::span<const std::size_t> grid);

}  // namespace pso
