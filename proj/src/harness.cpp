#include "pso/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "pso/bench.hpp"
#include "pso/errors.hpp"
#include "pso/kernels.hpp"
#include "pso/metrics.hpp"
#include "pso/optimizer.hpp"
#include "pso/rng.hpp"
#include "pso/strategy.hpp"
#include "pso/theory.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace pso {
namespace {

constexpr std::size_t kRunsFields = 13;
constexpr std::size_t kTraceFields = 11;
constexpr std::size_t kVolumeFields = 10;
constexpr std::size_t kAvgRanksPoints = 500;

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_ms(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

template <class T>
bool parse_uint(const std::string& s, T& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a sibling temp file so readers never see a half-written file.
void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

// Opens for appending after dropping a torn final line, and writes the
// header into an empty file.
std::ofstream open_append(const fs::path& path, std::string_view header) {
  if (fs::exists(path)) {
    const std::string content = read_file(path);
    const auto last = content.find_last_of('\n');
    const std::size_t keep = last == std::string::npos ? 0 : last + 1;
    if (keep != content.size()) fs::resize_file(path, keep);
  }
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw ConfigError("cannot append to '" + path.string() + "'");
  if (fresh) out << header << '\n';
  return out;
}

struct CellKey {
  std::string suite;
  std::string problem;
  std::size_t dim = 0;
  std::string strategy;
  std::size_t run = 0;
  auto operator<=>(const CellKey&) const = default;
};

std::optional<CellKey> key_of(const std::vector<std::string>& f) {
  CellKey k;
  if (f.size() < 5) return std::nullopt;
  k.suite = f[0];
  k.problem = f[1];
  k.strategy = f[3];
  if (!parse_uint(f[2], k.dim) || !parse_uint(f[4], k.run)) return std::nullopt;
  return k;
}

std::string key_prefix(const CellKey& k) {
  return k.suite + "," + k.problem + "," + std::to_string(k.dim) + "," + k.strategy + "," +
         std::to_string(k.run);
}

std::optional<RunRow> parse_run_row(const std::string& line) {
  const auto f = split_csv(line);
  if (f.size() != kRunsFields) return std::nullopt;
  RunRow r;
  const auto key = key_of(f);
  if (!key) return std::nullopt;
  r.suite = key->suite;
  r.problem = key->problem;
  r.dim = key->dim;
  r.strategy = key->strategy;
  r.run = key->run;
  if (!parse_uint(f[5], r.seed) || !parse_double(f[6], r.best_f) ||
      !parse_uint(f[7], r.evals_used) || !parse_double(f[8], r.wall_ms) ||
      !(f[9] == "0" || f[9] == "1") || !parse_uint(f[10], r.master_seed))
    return std::nullopt;
  r.success = f[9] == "1";
  r.config_hash = f[11];
  r.status = f[12];
  if (r.status != "ok" && r.status != "failed") return std::nullopt;
  return r;
}

// Keeps the last run row per cell and rewrites the file sorted by cell.
std::set<CellKey> canonicalize_runs(const fs::path& path) {
  std::map<CellKey, std::string> rows;
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (!parse_run_row(line)) continue;
      rows[*key_of(split_csv(line))] = line;
    }
  }
  std::string out(kRunsHeader);
  out += '\n';
  std::set<CellKey> keys;
  for (const auto& [k, line] : rows) {
    out += line;
    out += '\n';
    keys.insert(k);
  }
  write_atomic(path, out);
  return keys;
}

// Per-cell blocks of consecutive lines. The last complete block of each
// completed cell is kept; blocks of cells without a run row are dropped.
void canonicalize_blocks(const fs::path& path, std::string_view header, std::size_t fields,
                         const std::set<CellKey>& completed) {
  if (!fs::exists(path)) return;
  struct Block {
    std::streamoff offset = 0;
    std::size_t length = 0;
  };
  std::map<CellKey, Block> last;
  {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::optional<CellKey> current;
    Block block;
    std::streamoff pos = 0;
    auto close = [&] {
      if (current && block.length > 0) last[*current] = block;
      current.reset();
      block = {};
    };
    while (std::getline(in, line)) {
      const std::streamoff start = pos;
      pos += static_cast<std::streamoff>(line.size() + 1);
      if (in.eof()) break;  // no trailing newline: torn write
      const auto f = split_csv(line);
      const auto key = f.size() == fields ? key_of(f) : std::nullopt;
      if (!key) {
        close();
        continue;
      }
      if (!current || *current != *key) {
        close();
        current = key;
        block.offset = start;
      }
      block.length += line.size() + 1;
    }
    close();
  }
  std::ifstream in(path, std::ios::binary);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << header << '\n';
    std::string buf;
    for (const auto& [key, block] : last) {
      if (!completed.contains(key)) continue;
      buf.resize(block.length);
      in.seekg(block.offset);
      in.read(buf.data(), static_cast<std::streamsize>(block.length));
      out << buf;
    }
    if (!out.flush()) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

bool valid_label(const std::string& s) {
  return !s.empty() && s.find_first_of(",\n\r\"") == std::string::npos;
}

std::vector<std::string> resolved_functions(const ExperimentPlan& plan) {
  if (plan.suite.empty()) return {};
  auto all = suite_functions(plan.suite);
  if (plan.functions.empty()) return all;
  for (const auto& f : plan.functions)
    if (std::find(all.begin(), all.end(), f) == all.end())
      throw ConfigError("function '" + f + "' is not part of suite '" + plan.suite + "'");
  return plan.functions;
}

fs::path manifest_path(const std::string& dir) { return fs::path(dir) / "manifest.json"; }

json read_manifest(const std::string& dir) {
  const auto path = manifest_path(dir);
  if (!fs::exists(path)) return json::object();
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("manifest.json: " + std::string(e.what()));
  }
}

std::size_t strategy_order(const std::string& name) {
  const auto& reg = registry_names();
  const auto it = std::find(reg.begin(), reg.end(), name);
  return static_cast<std::size_t>(it - reg.begin());
}

void sort_strategies(std::vector<std::string>& names) {
  std::stable_sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
    const auto oa = strategy_order(a), ob = strategy_order(b);
    return oa != ob ? oa < ob : a < b;
  });
}

[[noreturn]] void throw_missing(const std::string& what, const std::vector<std::string>& cells) {
  std::string msg = what + ": " + std::to_string(cells.size()) + " missing cell(s):";
  const std::size_t shown = std::min<std::size_t>(cells.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) msg += " " + cells[i];
  if (shown < cells.size()) msg += " ...";
  throw IncompleteDataError(msg);
}

}  // namespace

// ---------------------------------------------------------------------------

void ExperimentPlan::validate() const {
  if (strategies.empty()) throw ConfigError("no strategies selected");
  std::set<std::string> seen;
  for (const auto& s : strategies) {
    const auto spec = parse_strategy(s);
    if (!seen.insert(std::string(short_name(spec.kind))).second)
      throw ConfigError("strategy '" + s + "' listed twice");
  }
  if (suite.empty() && problem_files.empty())
    throw ConfigError("no problems: give a suite or problem files");
  if (!suite.empty() && dims.empty()) throw ConfigError("no dimensions selected");
  for (auto d : dims)
    if (d == 0) throw ConfigError("dimension must be positive");
  if (runs == 0) throw ConfigError("runs must be at least 1");
  if (swarm_size < 3) throw ConfigError("swarm size must be at least 3");
  if (budget < swarm_size)
    throw ConfigError("budget " + std::to_string(budget) + " is below the swarm size " +
                      std::to_string(swarm_size));
  if (output_dir.empty()) throw ConfigError("no output directory");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  resolved_functions(*this);
}

std::string ExperimentPlan::config_hash() const {
  json j;
  j["suite"] = suite;
  j["functions"] = resolved_functions(*this);
  json files = json::array();
  for (const auto& f : problem_files) files.push_back(hex64(fnv1a(read_file(f))));
  j["problem_files"] = files;
  j["budget"] = budget;
  j["swarm_size"] = swarm_size;
  j["master_seed"] = master_seed;
  j["record_wall_time"] = record_wall_time;
  j["write_trace"] = write_trace;
  j["trace_stride"] = trace_stride == 0 ? swarm_size : trace_stride;
  j["record_volume"] = record_volume;
  return hex64(fnv1a(j.dump()));
}

std::vector<PlannedProblem> plan_problems(const ExperimentPlan& plan) {
  std::vector<PlannedProblem> out;
  const auto functions = resolved_functions(plan);
  for (auto dim : plan.dims) {
    for (const auto& name : functions) {
      const auto& fn = find_function(name);
      if (dim < fn.min_dim) {
        if (!plan.functions.empty())
          throw ConfigError("function '" + name + "' needs at least " +
                            std::to_string(fn.min_dim) + " dimensions");
        continue;
      }
      out.push_back({plan.suite, make_problem(name, dim)});
    }
  }
  for (const auto& file : plan.problem_files) {
    auto p = load_external_problem(file);
    if (!valid_label(p.name)) throw ConfigError("problem name '" + p.name + "' is not CSV-safe");
    out.push_back({"external", std::move(p)});
  }
  return out;
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view strategy,
                        std::string_view problem, std::size_t dim, std::size_t run) {
  std::string label(strategy);
  label += '/';
  label += problem;
  label += '/';
  label += std::to_string(dim);
  label += '/';
  label += std::to_string(run);
  return mix_seed(master_seed, label);
}

ExperimentSummary run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const fs::path dir(plan.output_dir);
  fs::create_directories(dir);
  const std::string hash = plan.config_hash();
  const auto problems = plan_problems(plan);

  json manifest = read_manifest(plan.output_dir);
  if (manifest.contains("config_hash") && manifest["config_hash"] != hash)
    throw ConfigError("output directory '" + plan.output_dir +
                      "' holds results of a different configuration (hash " +
                      manifest["config_hash"].get<std::string>() + ", this plan " + hash + ")");
  const std::size_t stride = plan.trace_stride == 0 ? plan.swarm_size : plan.trace_stride;

  // Manifest: union of everything planned so far against this directory.
  auto merge = [&](const char* key, const json& values) {
    json arr = manifest.value(key, json::array());
    for (const auto& v : values)
      if (std::find(arr.begin(), arr.end(), v) == arr.end()) arr.push_back(v);
    manifest[key] = arr;
  };
  std::vector<StrategySpec> specs;
  std::vector<std::string> labels;
  for (const auto& s : plan.strategies) {
    specs.push_back(parse_strategy(s));
    labels.emplace_back(short_name(specs.back().kind));
  }
  manifest["config_hash"] = hash;
  manifest["suite"] = plan.suite;
  manifest["budget"] = plan.budget;
  manifest["swarm_size"] = plan.swarm_size;
  manifest["master_seed"] = plan.master_seed;
  manifest["trace_stride"] = stride;
  manifest["success_threshold"] = kSuccessThreshold;
  manifest["runs"] = std::max<std::size_t>(manifest.value("runs", std::size_t{0}), plan.runs);
  merge("strategies", labels);
  merge("dims", plan.dims);
  merge("problem_files", plan.problem_files);
  json& known = manifest["problems"];
  if (!known.is_object()) known = json::object();
  for (const auto& pp : problems) {
    const std::string id = pp.problem.name + "/" + std::to_string(pp.problem.dim);
    known[id] = {{"suite", pp.suite},
                 {"name", pp.problem.name},
                 {"dim", pp.problem.dim},
                 {"f_star", pp.problem.f_star ? json(*pp.problem.f_star) : json(nullptr)}};
  }
  write_atomic(manifest_path(plan.output_dir), manifest.dump(2) + "\n");

  const fs::path runs_path = dir / "runs.csv";
  const fs::path trace_path = dir / "trace.csv";
  const fs::path volume_path = dir / "volume.csv";

  std::set<CellKey> done;
  for (const auto& row : read_runs(runs_path.string()))
    done.insert({row.suite, row.problem, row.dim, row.strategy, row.run});

  struct Cell {
    const PlannedProblem* problem;
    std::size_t strategy;
    std::size_t run;
  };
  std::vector<Cell> pending;
  ExperimentSummary summary;
  for (const auto& pp : problems)
    for (std::size_t s = 0; s < specs.size(); ++s)
      for (std::size_t r = 0; r < plan.runs; ++r) {
        ++summary.cells_total;
        if (done.contains({pp.suite, pp.problem.name, pp.problem.dim, labels[s], r}))
          ++summary.cells_skipped;
        else
          pending.push_back({&pp, s, r});
      }

  {
    auto runs_out = open_append(runs_path, kRunsHeader);
    std::ofstream trace_out, volume_out;
    if (plan.write_trace) trace_out = open_append(trace_path, kTraceHeader);
    if (plan.record_volume) volume_out = open_append(volume_path, kVolumeHeader);
    std::mutex io;

    RunConfig cfg;
    cfg.swarm_size = plan.swarm_size;
    cfg.max_evals = plan.budget;
    cfg.runs = plan.runs;
    cfg.seed = plan.master_seed;

    auto run_cell = [&](std::size_t k) {
      const Cell& cell = pending[k];
      const Problem& problem = cell.problem->problem;
      const std::string& label = labels[cell.strategy];
      const std::uint64_t seed =
          cell_seed(plan.master_seed, label, problem.name, problem.dim, cell.run);
      const CellKey key{cell.problem->suite, problem.name, problem.dim, label, cell.run};
      const std::string prefix = key_prefix(key);
      const std::string tail =
          std::to_string(seed) + "," + std::to_string(plan.master_seed) + "," + hash;

      RngStream rng(seed);
      RunOptions options;
      options.record_diversity = plan.write_trace;
      options.record_volume = plan.record_volume;
      std::string row, trace, volume;
      try {
        const RunRecord rec = run_optimizer(problem, specs[cell.strategy], cfg, rng, options);
        const bool success =
            problem.f_star && std::abs(rec.final_best - *problem.f_star) <= kSuccessThreshold;
        row = prefix + "," + std::to_string(seed) + "," + fmt(rec.final_best) + "," +
              std::to_string(rec.evals_used) + "," +
              fmt_ms(plan.record_wall_time ? rec.wall_ms : 0.0) + "," + (success ? "1" : "0") +
              "," + std::to_string(plan.master_seed) + "," + hash + ",ok\n";
        if (plan.write_trace) {
          std::size_t di = 0;
          double div = std::nan("");
          auto emit = [&](std::size_t e) {
            while (di < rec.diversity.size() && rec.diversity[di].eval <= e)
              div = rec.diversity[di++].value;
            trace += prefix + "," + std::to_string(e) + "," + fmt(rec.trace.best_at(e)) + "," +
                     fmt(div) + "," + tail + "\n";
          };
          for (std::size_t e = stride; e <= rec.evals_used; e += stride) emit(e);
          if (rec.evals_used % stride != 0) emit(rec.evals_used);
        }
        for (const auto& s : rec.log_volume)
          volume += prefix + "," + std::to_string(s.eval) + "," + fmt(s.value) + "," + tail + "\n";
      } catch (const EvaluationError&) {
        row = prefix + "," + std::to_string(seed) + ",nan,0," + fmt_ms(0.0) + ",0," +
              std::to_string(plan.master_seed) + "," + hash + ",failed\n";
        trace.clear();
        volume.clear();
      }
      std::lock_guard lock(io);
      // Trace blocks go first: a cell counts as done only once its run row exists.
      if (plan.write_trace) trace_out << trace << std::flush;
      if (plan.record_volume) volume_out << volume << std::flush;
      runs_out << row << std::flush;
      ++summary.cells_run;
      if (row.ends_with(",failed\n")) ++summary.cells_failed;
    };
    const auto exec = plan.threads == 1 ? kernels::Exec::serial : kernels::Exec::parallel;
    kernels::for_each_cell(pending.size(), run_cell, exec, plan.threads);
  }

  const auto completed = canonicalize_runs(runs_path);
  if (plan.write_trace) canonicalize_blocks(trace_path, kTraceHeader, kTraceFields, completed);
  if (plan.record_volume)
    canonicalize_blocks(volume_path, kVolumeHeader, kVolumeFields, completed);
  return summary;
}

std::vector<RunRow> read_runs(const std::string& path) {
  std::vector<RunRow> rows;
  if (!fs::exists(path)) return rows;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (in.eof()) break;  // torn final line
    if (auto row = parse_run_row(line)) rows.push_back(std::move(*row));
  }
  return rows;
}

ResultTable result_table(const std::vector<RunRow>& rows) {
  ResultTable table;
  for (const auto& r : rows)
    if (r.status == "ok") table.add({r.strategy, r.problem, r.dim, r.run}, r.best_f);
  return table;
}

ReportKind parse_report_kind(std::string_view text) {
  static const std::map<std::string, ReportKind, std::less<>> kinds = {
      {"ranks", ReportKind::ranks},         {"wdl", ReportKind::wdl},
      {"pi", ReportKind::pi},               {"avgranks", ReportKind::avgranks},
      {"diversity", ReportKind::diversity}, {"stability", ReportKind::stability}};
  const auto it = kinds.find(text);
  if (it == kinds.end())
    throw ConfigError("unknown report kind '" + std::string(text) +
                      "' (valid: ranks, wdl, pi, avgranks, diversity, stability)");
  return it->second;
}

std::string stability_csv(double omega_lo, double omega_hi, double phi_lo, double phi_hi,
                          double step) {
  if (!(step > 0) || !(omega_lo <= omega_hi) || !(phi_lo <= phi_hi))
    throw ConfigError("invalid stability grid ranges");
  std::string out = "omega,phi,max_modulus,class\n";
  for (const auto& c : stability_grid(omega_lo, omega_hi, phi_lo, phi_hi, step)) {
    out += fmt(c.omega) + "," + fmt(c.phi) + "," + fmt(c.max_modulus) + "," +
           std::string(to_string(c.stability)) + "\n";
  }
  return out;
}

namespace {

struct ReportContext {
  fs::path out_dir;
  std::vector<RunRow> rows;
  ResultTable table;
  json manifest;
};

ReportContext load_context(const ReportOptions& o, bool need_runs) {
  ReportContext ctx;
  ctx.out_dir = !o.output_dir.empty()    ? fs::path(o.output_dir)
                : !o.input_dir.empty()   ? fs::path(o.input_dir) / "reports"
                                         : fs::path("reports");
  if (need_runs) {
    if (o.input_dir.empty()) throw ConfigError("no results directory given");
    const auto runs = fs::path(o.input_dir) / "runs.csv";
    if (!fs::exists(runs))
      throw IncompleteDataError("no results: '" + runs.string() + "' does not exist");
    ctx.rows = read_runs(runs.string());
    ctx.table = result_table(ctx.rows);
    ctx.manifest = read_manifest(o.input_dir);
  }
  fs::create_directories(ctx.out_dir);
  return ctx;
}

std::vector<std::string> all_strategies(const ResultTable& t) {
  std::set<std::string> s;
  for (auto d : t.dims())
    for (const auto& name : t.strategies(d)) s.insert(name);
  std::vector<std::string> v(s.begin(), s.end());
  sort_strategies(v);
  return v;
}

std::vector<std::size_t> report_dims(const ReportContext& ctx) {
  std::set<std::size_t> dims;
  for (const auto& r : ctx.rows) dims.insert(r.dim);
  if (dims.empty()) throw IncompleteDataError("runs.csv holds no results");
  return {dims.begin(), dims.end()};
}

// Strategies, problems and runs that any row of `dim` mentions, failed or not.
struct Layout {
  std::vector<std::string> strategies, problems;
  std::vector<std::size_t> runs;
};

Layout layout(const ReportContext& ctx, std::size_t dim) {
  std::set<std::string> s, p;
  std::set<std::size_t> r;
  for (const auto& row : ctx.rows)
    if (row.dim == dim) {
      s.insert(row.strategy);
      p.insert(row.problem);
      r.insert(row.run);
    }
  Layout l{{s.begin(), s.end()}, {p.begin(), p.end()}, {r.begin(), r.end()}};
  sort_strategies(l.strategies);
  return l;
}

// Full product check including cells recorded as failed.
void require_complete(const ReportContext& ctx, std::size_t dim) {
  const auto l = layout(ctx, dim);
  std::vector<std::string> missing;
  for (const auto& s : l.strategies)
    for (const auto& p : l.problems)
      for (auto r : l.runs)
        if (!ctx.table.get({s, p, dim, r}))
          missing.push_back(s + "/" + p + "/" + std::to_string(dim) + "/" + std::to_string(r));
  if (!missing.empty()) throw_missing("dimension " + std::to_string(dim), missing);
}

std::optional<double> f_star_of(const ReportContext& ctx, const std::string& problem,
                                std::size_t dim) {
  const auto& known = ctx.manifest.value("problems", json::object());
  const auto it = known.find(problem + "/" + std::to_string(dim));
  if (it != known.end() && it->contains("f_star") && (*it)["f_star"].is_number())
    return (*it)["f_star"].get<double>();
  if (it != known.end()) return std::nullopt;
  try {
    return find_function(problem).f_star;
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

std::string write_ranks(const ReportContext& ctx) {
  const auto names = all_strategies(ctx.table);
  std::string out = "dim";
  for (const auto& s : names) out += "," + s;
  out += "\n";
  for (auto dim : report_dims(ctx)) {
    require_complete(ctx, dim);
    const auto ranks = friedman_mean_ranks(ctx.table, dim);
    out += std::to_string(dim);
    for (const auto& s : names) {
      out += ",";
      if (auto it = ranks.find(s); it != ranks.end()) out += fmt(it->second);
    }
    out += "\n";
  }
  const auto path = ctx.out_dir / "ranks.csv";
  write_atomic(path, out);
  return path.string();
}

std::string write_wdl(const ReportContext& ctx, const std::string& baseline_name) {
  if (baseline_name.empty()) throw ConfigError("wdl report needs --baseline");
  const std::string baseline(short_name(parse_strategy(baseline_name).kind));
  std::string out = "dim,baseline,strategy,wins,draws,losses\n";
  for (auto dim : report_dims(ctx)) {
    require_complete(ctx, dim);
    const auto present = ctx.table.strategies(dim);
    if (std::find(present.begin(), present.end(), baseline) == present.end())
      throw ConfigError("baseline '" + baseline + "' has no results at dimension " +
                        std::to_string(dim));
    const auto m = wdl_matrix(ctx.table, baseline, dim);
    auto names = present;
    sort_strategies(names);
    for (const auto& s : names) {
      const auto it = m.find(s);
      if (it == m.end()) continue;
      out += std::to_string(dim) + "," + baseline + "," + s + "," +
             std::to_string(it->second.wins) + "," + std::to_string(it->second.draws) + "," +
             std::to_string(it->second.losses) + "\n";
    }
  }
  const auto path = ctx.out_dir / "wdl.csv";
  write_atomic(path, out);
  return path.string();
}

std::string write_pi(const ReportContext& ctx) {
  std::string out = "dim,case,omega,strategy,pi\n";
  for (auto dim : report_dims(ctx)) {
    require_complete(ctx, dim);
    const auto l = layout(ctx, dim);
    // stats[s][p]
    std::vector<std::vector<ProblemStats>> stats(l.strategies.size(),
                                                 std::vector<ProblemStats>(l.problems.size()));
    std::vector<ProblemMins> mins(l.problems.size());
    for (std::size_t p = 0; p < l.problems.size(); ++p) {
      const auto fstar = f_star_of(ctx, l.problems[p], dim);
      double reference = fstar.value_or(kInf);
      if (!fstar)
        for (const auto& r : ctx.rows)
          if (r.dim == dim && r.problem == l.problems[p]) reference = std::min(reference, r.best_f);
      for (std::size_t s = 0; s < l.strategies.size(); ++s) {
        ProblemStats& st = stats[s][p];
        double time = 0, err = 0;
        for (const auto& r : ctx.rows) {
          if (r.dim != dim || r.problem != l.problems[p] || r.strategy != l.strategies[s])
            continue;
          st.runs += 1;
          st.successes += r.success ? 1 : 0;
          time += r.wall_ms;
          err += std::max(0.0, r.best_f - reference);
        }
        st.avg_time = time / st.runs;
        st.avg_fitness = err / st.runs;
      }
      mins[p].min_time = kInf;
      mins[p].min_fitness = kInf;
      for (std::size_t s = 0; s < l.strategies.size(); ++s) {
        mins[p].min_time = std::min(mins[p].min_time, stats[s][p].avg_time);
        mins[p].min_fitness = std::min(mins[p].min_fitness, stats[s][p].avg_fitness);
      }
    }
    for (int which = 1; which <= 3; ++which)
      for (int k = 0; k <= 10; ++k) {
        const double omega = k / 10.0;
        const auto w = pi_case(which, omega);
        for (std::size_t s = 0; s < l.strategies.size(); ++s)
          out += std::to_string(dim) + "," + std::to_string(which) + "," + fmt(omega) + "," +
                 l.strategies[s] + "," + fmt(performance_index(stats[s], mins, w)) + "\n";
      }
  }
  const auto path = ctx.out_dir / "pi.csv";
  write_atomic(path, out);
  return path.string();
}

// Streams trace.csv, calling fn(key, eval, best_f, diversity) per valid row.
template <class Fn>
void scan_trace(const std::string& input_dir, Fn&& fn) {
  const auto path = fs::path(input_dir) / "trace.csv";
  if (!fs::exists(path))
    throw IncompleteDataError("no traces: '" + path.string() +
                              "' does not exist (runs made with --no-trace?)");
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (in.eof()) break;
    const auto f = split_csv(line);
    if (f.size() != kTraceFields) continue;
    const auto key = key_of(f);
    std::size_t eval = 0;
    double best = 0, div = 0;
    if (!key || !parse_uint(f[5], eval) || !parse_double(f[6], best) || !parse_double(f[7], div))
      continue;
    fn(*key, eval, best, div);
  }
}

std::string write_avgranks(const ReportContext& ctx, const std::string& input_dir) {
  std::map<ResultKey, Trace> traces;
  scan_trace(input_dir, [&](const CellKey& k, std::size_t eval, double best, double) {
    traces[{k.strategy, k.problem, k.dim, k.run}].record(eval, best);
  });
  const std::size_t swarm = ctx.manifest.value("swarm_size", std::size_t{0});
  const std::size_t budget = ctx.manifest.value("budget", std::size_t{0});
  if (swarm == 0 || budget < swarm)
    throw IncompleteDataError("manifest.json lacks swarm_size/budget");
  const auto grid = geometric_grid(swarm, budget, kAvgRanksPoints);

  std::string out = "dim,eval,strategy,avg_rank\n";
  for (auto dim : report_dims(ctx)) {
    require_complete(ctx, dim);
    const auto l = layout(ctx, dim);
    std::vector<std::vector<Trace>> set(l.strategies.size());
    std::vector<std::string> missing;
    for (std::size_t s = 0; s < l.strategies.size(); ++s)
      for (const auto& p : l.problems)
        for (auto r : l.runs) {
          const auto it = traces.find({l.strategies[s], p, dim, r});
          if (it == traces.end()) {
            missing.push_back(l.strategies[s] + "/" + p + "/" + std::to_string(dim) + "/" +
                              std::to_string(r));
            continue;
          }
          set[s].push_back(it->second);
        }
    if (!missing.empty()) throw_missing("traces at dimension " + std::to_string(dim), missing);
    const auto ranks = avg_ranks_trace(set, grid);
    for (std::size_t g = 0; g < grid.size(); ++g)
      for (std::size_t s = 0; s < l.strategies.size(); ++s)
        out += std::to_string(dim) + "," + std::to_string(grid[g]) + "," + l.strategies[s] + "," +
               fmt(ranks[s][g]) + "\n";
  }
  const auto path = ctx.out_dir / "avgranks.csv";
  write_atomic(path, out);
  return path.string();
}

std::string write_diversity(const ReportContext& ctx, const std::string& input_dir) {
  struct Acc {
    double sum = 0;
    std::size_t n = 0;
  };
  // (dim, problem, strategy order, strategy, eval)
  std::map<std::tuple<std::size_t, std::string, std::size_t, std::string, std::size_t>, Acc> acc;
  scan_trace(input_dir, [&](const CellKey& k, std::size_t eval, double, double div) {
    if (!ctx.table.get({k.strategy, k.problem, k.dim, k.run}) || std::isnan(div)) return;
    auto& a = acc[{k.dim, k.problem, strategy_order(k.strategy), k.strategy, eval}];
    a.sum += div;
    a.n += 1;
  });
  if (acc.empty()) throw IncompleteDataError("trace.csv holds no diversity samples");
  std::string out = "dim,problem,strategy,eval,mean_diversity,runs\n";
  for (const auto& [key, a] : acc) {
    const auto& [dim, problem, order, strategy, eval] = key;
    (void)order;
    out += std::to_string(dim) + "," + problem + "," + strategy + "," + std::to_string(eval) +
           "," + fmt(a.sum / static_cast<double>(a.n)) + "," + std::to_string(a.n) + "\n";
  }
  const auto path = ctx.out_dir / "diversity.csv";
  write_atomic(path, out);
  return path.string();
}

std::vector<std::string> write_stability(const ReportContext& ctx, const ReportOptions& o) {
  std::vector<std::string> written;
  const auto grid_path = ctx.out_dir / "stability.csv";
  write_atomic(grid_path, stability_csv(o.omega_lo, o.omega_hi, o.phi_lo, o.phi_hi, o.step));
  written.push_back(grid_path.string());

  std::vector<std::string> names = ctx.rows.empty() ? registry_names() : all_strategies(ctx.table);
  std::string out = "strategy,progress,omega,phi,max_modulus,class\n";
  for (const auto& name : names) {
    const auto spec = parse_strategy(name);
    for (double t : {0.0, 0.5, 1.0}) {
      RecurrenceParams rp;
      try {
        rp = recurrence_from_spec(spec, t);
      } catch (const ConfigError&) {
        break;  // no single recurrence for ensembles
      }
      out += name + "," + fmt(t) + "," + fmt(rp.omega) + "," + fmt(rp.phi) + "," +
             fmt(stability_eigenvalues(rp).max_modulus()) + "," +
             std::string(to_string(classify_stability(rp))) + "\n";
    }
  }
  const auto path = ctx.out_dir / "stability_strategies.csv";
  write_atomic(path, out);
  written.push_back(path.string());
  return written;
}

}  // namespace

std::vector<std::string> write_report(ReportKind kind, const ReportOptions& options) {
  const bool need_runs = kind != ReportKind::stability ||
                         (!options.input_dir.empty() &&
                          fs::exists(fs::path(options.input_dir) / "runs.csv"));
  const auto ctx = load_context(options, need_runs);
  switch (kind) {
    case ReportKind::ranks:
      return {write_ranks(ctx)};
    case ReportKind::wdl:
      return {write_wdl(ctx, options.baseline)};
    case ReportKind::pi:
      return {write_pi(ctx)};
    case ReportKind::avgranks:
      return {write_avgranks(ctx, options.input_dir)};
    case ReportKind::diversity:
      return {write_diversity(ctx, options.input_dir)};
    case ReportKind::stability:
      return write_stability(ctx, options);
  }
  return {};
}

}  // namespace pso
