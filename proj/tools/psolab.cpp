// psolab: run PSO comparison experiments and build reports from their results.
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pso/bench.hpp"
#include "pso/errors.hpp"
#include "pso/harness.hpp"
#include "pso/strategy.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIncomplete = 3;

// "lo:hi" or "lo,hi".
std::pair<double, double> parse_range(const std::string& text, const char* what) {
  const auto sep = text.find_first_of(":,");
  if (sep == std::string::npos)
    throw pso::ConfigError(std::string(what) + " must look like lo:hi, got '" + text + "'");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, sep), b = text.substr(sep + 1);
    const double lo = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const double hi = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    if (!(lo <= hi)) throw pso::ConfigError(std::string(what) + " has lo > hi");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw pso::ConfigError(std::string(what) + " must look like lo:hi, got '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSO learning-strategy experiment harness"};
  app.require_subcommand(1);

  // run
  pso::ExperimentPlan plan;
  std::vector<std::string> strategies;
  bool no_wall_time = false, no_trace = false;
  std::vector<std::string> metrics;
  auto* run = app.add_subcommand("run", "Run (or resume) an experiment");
  run->add_option("--suite", plan.suite, "Benchmark suite; empty for external problems only")
      ->capture_default_str();
  run->add_option("--functions", plan.functions, "Subset of the suite's functions")
      ->delimiter(',');
  run->add_option("--problem-file", plan.problem_files, "External problem JSON (repeatable)");
  run->add_option("--strategies", strategies, "Registry names, comma separated")
      ->delimiter(',')
      ->required();
  run->add_option("--dims", plan.dims, "Dimensions, comma separated")->delimiter(',');
  run->add_option("--runs", plan.runs, "Independent runs per cell")->capture_default_str();
  run->add_option("--budget", plan.budget, "Evaluations per run")->capture_default_str();
  run->add_option("--swarm", plan.swarm_size, "Swarm size")->capture_default_str();
  run->add_option("--seed", plan.master_seed, "Master seed")->capture_default_str();
  run->add_option("--out", plan.output_dir, "Output directory")->required();
  run->add_option("--threads", plan.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  run->add_option("--trace-stride", plan.trace_stride,
                  "Evaluations between trace rows (0 = swarm size)");
  run->add_flag("--no-trace", no_trace, "Skip trace.csv");
  run->add_flag("--no-wall-time", no_wall_time, "Write wall_ms as 0 for byte-stable output");
  run->add_option("--metrics", metrics, "Extra metrics: volume")->delimiter(',');

  // report
  pso::ReportOptions ropts;
  std::string kind;
  std::string omega_range, phi_range;
  auto* report = app.add_subcommand("report", "Build a report from a results directory");
  report->add_option("--kind", kind, "ranks|wdl|pi|avgranks|diversity|stability")->required();
  report->add_option("--in", ropts.input_dir, "Results directory");
  report->add_option("--out", ropts.output_dir, "Report directory (default <in>/reports)");
  report->add_option("--baseline", ropts.baseline, "Baseline strategy for wdl");
  report->add_option("--omega-range", omega_range, "Stability grid omega range lo:hi");
  report->add_option("--phi-range", phi_range, "Stability grid phi range lo:hi");

  // theory map
  std::string map_omega = "-0.2:1.2", map_phi = "0:4.5", map_out;
  double map_step = 0.01;
  auto* theory = app.add_subcommand("theory", "Stability analysis");
  theory->require_subcommand(1);
  auto* map = theory->add_subcommand("map", "Classify an (omega, phi) grid");
  map->add_option("--omega-range", map_omega, "lo:hi")->capture_default_str();
  map->add_option("--phi-range", map_phi, "lo:hi")->capture_default_str();
  map->add_option("--step", map_step, "Grid step")->capture_default_str();
  map->add_option("--out", map_out, "CSV file (default stdout)");

  // list
  std::string what;
  auto* list = app.add_subcommand("list", "List registered strategies or functions");
  list->add_option("what", what, "strategies|functions")
      ->required()
      ->check(CLI::IsMember({"strategies", "functions"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      plan.strategies = strategies;
      plan.record_wall_time = !no_wall_time;
      plan.write_trace = !no_trace;
      for (const auto& m : metrics) {
        if (m == "volume")
          plan.record_volume = true;
        else if (m != "diversity")
          throw pso::ConfigError("unknown metric '" + m + "' (valid: diversity, volume)");
      }
      const auto s = pso::run_experiment(plan);
      std::cout << "cells: " << s.cells_total << " total, " << s.cells_run << " run, "
                << s.cells_skipped << " cached, " << s.cells_failed << " failed\n";
    } else if (*report) {
      const auto k = pso::parse_report_kind(kind);
      if (!omega_range.empty())
        std::tie(ropts.omega_lo, ropts.omega_hi) = parse_range(omega_range, "--omega-range");
      if (!phi_range.empty())
        std::tie(ropts.phi_lo, ropts.phi_hi) = parse_range(phi_range, "--phi-range");
      if (k != pso::ReportKind::stability && ropts.input_dir.empty())
        throw pso::ConfigError("--in is required for this report");
      for (const auto& f : pso::write_report(k, ropts)) std::cout << f << "\n";
    } else if (*map) {
      const auto [olo, ohi] = parse_range(map_omega, "--omega-range");
      const auto [plo, phi] = parse_range(map_phi, "--phi-range");
      const auto csv = pso::stability_csv(olo, ohi, plo, phi, map_step);
      if (map_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(map_out, std::ios::binary);
        if (!out) throw pso::ConfigError("cannot write '" + map_out + "'");
        out << csv;
      }
    } else if (*list) {
      if (what == "strategies") {
        for (const auto& name : pso::registry_names()) {
          const auto spec = pso::parse_strategy(name);
          std::cout << name << "\t" << pso::kind_name(spec.kind) << "\n";
        }
      } else {
        for (const auto& f : pso::function_catalog())
          std::cout << f.name << "\t[" << f.lower << ", " << f.upper << "]\tf*=" << f.f_star
                    << "\n";
      }
    }
  } catch (const pso::IncompleteDataError& e) {
    std::cerr << "incomplete data: " << e.what() << "\n";
    return kExitIncomplete;
  } catch (const pso::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pso::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
