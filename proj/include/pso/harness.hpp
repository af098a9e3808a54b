#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pso/problem.hpp"
#include "pso/stats.hpp"

namespace pso {

inline constexpr std::string_view kRunsHeader =
    "suite,problem,dim,strategy,run,seed,best_f,evals_used,wall_ms,success,master_seed,"
    "config_hash,status";
inline constexpr std::string_view kTraceHeader =
    "suite,problem,dim,strategy,run,eval,best_f,diversity,seed,master_seed,config_hash";
inline constexpr std::string_view kVolumeHeader =
    "suite,problem,dim,strategy,run,eval,log_volume,seed,master_seed,config_hash";

/// |best_f - f_star| at or below this counts as a successful run.
inline constexpr double kSuccessThreshold = 1e-6;

struct ExperimentPlan {
  std::string suite = "classical";  // empty: external problems only
  std::vector<std::string> functions;  // subset of the suite; empty = all
  std::vector<std::string> problem_files;
  std::vector<std::string> strategies;  // registry names
  std::vector<std::size_t> dims;
  std::size_t runs = 25;
  std::size_t budget = 75'000;
  std::size_t swarm_size = 75;
  std::uint64_t master_seed = 0;
  std::string output_dir;
  int threads = 0;               // 0 = all available
  bool record_wall_time = true;
  bool write_trace = true;
  std::size_t trace_stride = 0;  // 0 = swarm size
  bool record_volume = false;

  /// Throws ConfigError.
  void validate() const;
  /// Hash of every setting that changes a cell's result (hex).
  std::string config_hash() const;
};

/// One problem instance of a plan.
struct PlannedProblem {
  std::string suite;
  Problem problem;
};

std::vector<PlannedProblem> plan_problems(const ExperimentPlan& plan);

/// Seed of one (strategy, problem, dim, run) cell.
std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view strategy,
                        std::string_view problem, std::size_t dim, std::size_t run);

struct ExperimentSummary {
  std::size_t cells_total = 0;
  std::size_t cells_run = 0;
  std::size_t cells_skipped = 0;  // already present in runs.csv
  std::size_t cells_failed = 0;
};

/// Runs every missing cell, appending to runs.csv / trace.csv, then rewrites
/// both files in canonical order through a temp file and rename.
ExperimentSummary run_experiment(const ExperimentPlan& plan);

/// A parsed runs.csv row.
struct RunRow {
  std::string suite;
  std::string problem;
  std::size_t dim = 0;
  std::string strategy;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double best_f = 0;
  std::size_t evals_used = 0;
  double wall_ms = 0;
  bool success = false;
  std::uint64_t master_seed = 0;
  std::string config_hash;
  std::string status;  // ok | failed
};

/// Reads runs.csv; malformed lines (for example a torn final write) are
/// skipped. Missing file yields an empty list.
std::vector<RunRow> read_runs(const std::string& path);

/// Final best fitness of every successful row.
ResultTable result_table(const std::vector<RunRow>& rows);

enum class ReportKind { ranks, wdl, pi, avgranks, diversity, stability };

ReportKind parse_report_kind(std::string_view text);

struct ReportOptions {
  std::string input_dir;
  std::string output_dir;  // empty = <input_dir>/reports
  std::string baseline;    // wdl only
  double omega_lo = -0.2, omega_hi = 1.2;
  double phi_lo = 0.0, phi_hi = 4.5;
  double step = 0.01;
};

/// Writes the report files and returns their paths. Throws
/// IncompleteDataError (listing the missing cells) when the results do not
/// cover the requested report.
std::vector<std::string> write_report(ReportKind kind, const ReportOptions& options);

/// Stability grid as CSV text (omega,phi,max_modulus,class).
std::string stability_csv(double omega_lo, double omega_hi, double phi_lo, double phi_hi,
                          double step);

}  // namespace pso
