#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pso/problem.hpp"

namespace pso {

/// Ascending ranks starting at 1; tied values share the mean of their ranks.
Vec average_ranks(std::span<const double> values);

struct ResultKey {
  std::string strategy;
  std::string problem;
  std::size_t dim = 0;
  std::size_t run = 0;

  auto operator<=>(const ResultKey&) const = default;
};

/// Final best fitness per (strategy, problem, dim, run) cell.
class ResultTable {
 public:
  void add(const ResultKey& key, double best_f);
  std::optional<double> get(const ResultKey& key) const;
  std::size_t size() const { return entries_.size(); }

  /// Distinct values present for `dim`, sorted.
  std::vector<std::string> strategies(std::size_t dim) const;
  std::vector<std::string> problems(std::size_t dim) const;
  std::vector<std::size_t> runs(std::size_t dim) const;
  std::vector<std::size_t> dims() const;

  /// Cells of the full strategy x problem x run product for `dim` that are
  /// absent, formatted "strategy/problem/dim/run".
  std::vector<std::string> missing_cells(std::size_t dim) const;
  bool complete(std::size_t dim) const { return missing_cells(dim).empty(); }

  /// Seed-paired sample of one strategy on one problem, ordered by run.
  Vec sample(const std::string& strategy, const std::string& problem, std::size_t dim) const;

 private:
  std::map<ResultKey, double> entries_;
};

// ---------------------------------------------------------------------------
// Friedman

enum class FriedmanBlocks { per_run, per_problem_mean };

/// blocks[b][s]: the value of strategy s in block b. Lower is better.
Vec friedman_mean_ranks(const std::vector<Vec>& blocks);

/// Mean rank per strategy over the table's blocks for `dim`. Throws
/// IncompleteDataError listing missing cells.
std::map<std::string, double> friedman_mean_ranks(const ResultTable& table, std::size_t dim,
                                                  FriedmanBlocks mode = FriedmanBlocks::per_run);

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank

struct WilcoxonResult {
  double w_plus = 0;    // rank sum of positive differences a - b
  double w_minus = 0;
  double statistic = 0; // min(w_plus, w_minus)
  double p_value = 1;   // two-sided
  std::size_t n = 0;    // non-zero differences
  bool exact = true;
};

/// Largest effective sample size handled by the exact null distribution.
inline constexpr std::size_t kWilcoxonExactMax = 25;

/// Paired two-sided test. Zero differences are dropped; ties share average
/// ranks. Exact distribution for n <= 25, otherwise normal approximation
/// with tie correction. Throws std::invalid_argument on length mismatch.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Win / draw / loss

struct Wdl {
  std::size_t wins = 0;
  std::size_t draws = 0;
  std::size_t losses = 0;

  bool operator==(const Wdl&) const = default;
};

double median(std::span<const double> values);

/// +1 when the baseline is significantly better (p < alpha and lower
/// median, mean as tie-break), -1 when significantly worse, else 0.
int compare_paired(std::span<const double> baseline, std::span<const double> other,
                   double alpha = 0.05);

/// Baseline-vs-each-strategy tallies over the table's problems for `dim`.
/// Throws IncompleteDataError on missing cells.
std::map<std::string, Wdl> wdl_matrix(const ResultTable& table, const std::string& baseline,
                                      std::size_t dim, double alpha = 0.05);

}  // namespace pso
