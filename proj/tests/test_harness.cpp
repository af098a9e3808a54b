#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "pso/errors.hpp"
#include "pso/harness.hpp"

using namespace pso;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("psolab_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

ExperimentPlan small_plan(const fs::path& dir, std::size_t runs = 2) {
  ExperimentPlan plan;
  plan.functions = {"sphere"};
  plan.strategies = {"CL"};
  plan.dims = {2};
  plan.runs = runs;
  plan.budget = 300;
  plan.swarm_size = 10;
  plan.master_seed = 5;
  plan.output_dir = dir.string();
  plan.record_wall_time = false;
  plan.threads = 1;
  return plan;
}

int psolab(const std::string& args) {
  const char* bin = std::getenv("PSOLAB");
  REQUIRE(bin != nullptr);
  const int status = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// runs.csv rows for a synthetic table: value(strategy, problem, run).
template <class F>
void write_runs(const fs::path& dir, const std::vector<std::string>& strategies,
                const std::vector<std::string>& problems, std::size_t runs, F value) {
  std::string text = std::string(kRunsHeader) + "\n";
  for (const auto& p : problems)
    for (const auto& s : strategies)
      for (std::size_t r = 0; r < runs; ++r)
        text += "classical," + p + ",10," + s + "," + std::to_string(r) + ",1," +
                std::to_string(value(s, p, r)) + ",100,2.000," +
                (value(s, p, r) == 0.0 ? "1" : "0") + ",1,abc,ok\n";
  spit(dir / "runs.csv", text);
}

}  // namespace

TEST_CASE("a small plan writes one row per run and caches on rerun") {
  const auto dir = fresh_dir("basic");
  const auto plan = small_plan(dir);
  const auto s = run_experiment(plan);
  REQUIRE(s.cells_total == 2);
  REQUIRE(s.cells_run == 2);
  const auto rows = read_runs((dir / "runs.csv").string());
  REQUIRE(rows.size() == 2);
  REQUIRE(lines(slurp(dir / "runs.csv")).front() == kRunsHeader);
  REQUIRE(lines(slurp(dir / "trace.csv")).front() == kTraceHeader);
  for (const auto& r : rows) {
    REQUIRE(r.status == "ok");
    REQUIRE(r.strategy == "CL");
    REQUIRE(r.evals_used <= 300);
    REQUIRE(r.seed == cell_seed(5, "CL", "sphere", 2, r.run));
    REQUIRE(r.config_hash == plan.config_hash());
  }
  REQUIRE(fs::exists(dir / "manifest.json"));

  const auto again = run_experiment(plan);
  REQUIRE(again.cells_run == 0);
  REQUIRE(again.cells_skipped == 2);
}

TEST_CASE("equal seeds give byte-identical outputs") {
  const auto a = fresh_dir("same_a"), b = fresh_dir("same_b");
  auto pa = small_plan(a, 3), pb = small_plan(b, 3);
  pb.threads = 0;
  run_experiment(pa);
  run_experiment(pb);
  REQUIRE(slurp(a / "runs.csv") == slurp(b / "runs.csv"));
  REQUIRE(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("deleted rows are recomputed identically") {
  const auto dir = fresh_dir("resume");
  const auto plan = small_plan(dir, 3);
  run_experiment(plan);
  const auto runs = slurp(dir / "runs.csv");
  const auto trace = slurp(dir / "trace.csv");
  auto kept = lines(runs);
  kept.erase(kept.begin() + 2);
  std::string text;
  for (const auto& l : kept) text += l + "\n";
  spit(dir / "runs.csv", text);
  const auto s = run_experiment(plan);
  REQUIRE(s.cells_run == 1);
  REQUIRE(slurp(dir / "runs.csv") == runs);
  REQUIRE(slurp(dir / "trace.csv") == trace);
}

TEST_CASE("a torn final line is discarded and the plan can grow") {
  const auto ref = fresh_dir("torn_ref"), dir = fresh_dir("torn");
  run_experiment(small_plan(ref, 3));
  run_experiment(small_plan(dir, 2));
  std::ofstream(dir / "runs.csv", std::ios::app | std::ios::binary) << "classical,sphere,2,CL,2,99";
  std::ofstream(dir / "trace.csv", std::ios::app | std::ios::binary) << "classical,sphere,2,CL,2,1";
  REQUIRE(read_runs((dir / "runs.csv").string()).size() == 2);
  const auto s = run_experiment(small_plan(dir, 3));
  REQUIRE(s.cells_run == 1);
  REQUIRE(slurp(dir / "runs.csv") == slurp(ref / "runs.csv"));
  REQUIRE(slurp(dir / "trace.csv") == slurp(ref / "trace.csv"));
}

TEST_CASE("changing a result-affecting setting is refused") {
  const auto dir = fresh_dir("mismatch");
  auto plan = small_plan(dir);
  run_experiment(plan);
  plan.budget = 400;
  REQUIRE_THROWS_AS(run_experiment(plan), ConfigError);
  auto wider = small_plan(dir);
  wider.strategies = {"CL", "DNL"};
  REQUIRE(run_experiment(wider).cells_run == 2);
}

TEST_CASE("plan validation") {
  const auto dir = fresh_dir("validate");
  auto plan = small_plan(dir);
  plan.strategies = {"NOPE"};
  REQUIRE_THROWS_AS(plan.validate(), ConfigError);
  plan = small_plan(dir);
  plan.budget = 5;
  REQUIRE_THROWS_AS(plan.validate(), ConfigError);
  plan = small_plan(dir);
  plan.functions = {"rosenbrock"};
  plan.dims = {1};
  REQUIRE_THROWS_AS(plan_problems(plan), ConfigError);
  plan.functions = {};
  for (const auto& p : plan_problems(plan)) REQUIRE(p.problem.name != "rosenbrock");
}

TEST_CASE("non-finite objectives produce failed rows") {
  const auto dir = fresh_dir("failed");
  const auto file = dir / "huge.json";
  spit(file, R"({"name": "huge", "dim": 2, "bounds": {"lower": [-1e200, -1e200],
    "upper": [1e200, 1e200]}, "base_function": "sphere", "shift": [0, 0],
    "rotation": "identity", "bias": 0, "f_star": 0})");
  auto plan = small_plan(dir / "out");
  plan.suite = "";
  plan.functions = {};
  plan.dims = {};
  plan.problem_files = {file.string()};
  const auto s = run_experiment(plan);
  REQUIRE(s.cells_failed == 2);
  for (const auto& r : read_runs((dir / "out" / "runs.csv").string())) {
    REQUIRE(r.status == "failed");
    REQUIRE(r.suite == "external");
  }
  REQUIRE(result_table(read_runs((dir / "out" / "runs.csv").string())).size() == 0);
}

TEST_CASE("reports on synthetic results") {
  const auto dir = fresh_dir("reports");
  write_runs(dir, {"CL", "DNL"}, {"sphere", "rastrigin"}, 4,
             [](const std::string& s, const std::string&, std::size_t r) {
               return static_cast<double>(r) + (s == "DNL" ? 0.0 : 10.0);
             });
  ReportOptions o;
  o.input_dir = dir.string();
  const auto ranks = write_report(ReportKind::ranks, o);
  REQUIRE(ranks.size() == 1);
  const auto rl = lines(slurp(ranks[0]));
  REQUIRE(rl[0] == "dim,CL,DNL");
  REQUIRE(rl[1] == "10,2,1");

  o.baseline = "DNL";
  const auto wdl = lines(slurp(write_report(ReportKind::wdl, o)[0]));
  REQUIRE(wdl[0] == "dim,baseline,strategy,wins,draws,losses");
  bool saw_self = false;
  for (const auto& l : wdl)
    if (l == "10,DNL,DNL,0,2,0") saw_self = true;
  REQUIRE(saw_self);
}

TEST_CASE("performance index of a lone strategy is one") {
  const auto dir = fresh_dir("pi");
  write_runs(dir, {"SL"}, {"sphere"}, 3,
             [](const std::string&, const std::string&, std::size_t) { return 0.0; });
  ReportOptions o;
  o.input_dir = dir.string();
  const auto pl = lines(slurp(write_report(ReportKind::pi, o)[0]));
  REQUIRE(pl[0] == "dim,case,omega,strategy,pi");
  REQUIRE(pl.size() == 1 + 3 * 11);
  for (std::size_t i = 1; i < pl.size(); ++i) REQUIRE(pl[i].ends_with(",SL,1"));
}

TEST_CASE("incomplete results are reported") {
  const auto dir = fresh_dir("incomplete");
  write_runs(dir, {"CL", "DNL"}, {"sphere"}, 2,
             [](const std::string&, const std::string&, std::size_t r) { return 1.0 * r; });
  auto rows = lines(slurp(dir / "runs.csv"));
  rows.pop_back();
  std::string text;
  for (const auto& l : rows) text += l + "\n";
  spit(dir / "runs.csv", text);
  ReportOptions o;
  o.input_dir = dir.string();
  REQUIRE_THROWS_AS(write_report(ReportKind::ranks, o), IncompleteDataError);
  REQUIRE_THROWS_AS(write_report(ReportKind::avgranks, o), IncompleteDataError);
  REQUIRE(psolab("report --kind ranks --in " + dir.string()) == 3);
  REQUIRE(psolab("report --kind ranks --in " + (dir / "missing").string()) == 3);
}

TEST_CASE("command line errors exit with the configuration code") {
  const auto dir = fresh_dir("cli");
  REQUIRE(psolab("run --strategies NOPE --out " + dir.string()) == 2);
  REQUIRE(psolab("run --strategies CL --dims 0 --out " + dir.string()) == 2);
  REQUIRE(psolab("report --kind bogus --in " + dir.string()) == 2);
  REQUIRE(psolab("frobnicate") == 2);
  REQUIRE(psolab("list strategies") == 0);
  REQUIRE(psolab("theory map --omega-range 0:0.1 --phi-range 0:0.1 --step 0.05 --out " +
                 (dir / "map.csv").string()) == 0);
  const auto map = lines(slurp(dir / "map.csv"));
  REQUIRE(map[0] == "omega,phi,max_modulus,class");
  REQUIRE(map.size() == 1 + 3 * 3);
  REQUIRE(psolab("run --strategies CL --functions sphere --dims 2 --runs 1 --budget 100 "
                 "--swarm 10 --out " + (dir / "run").string()) == 0);
  REQUIRE(read_runs((dir / "run" / "runs.csv").string()).size() == 1);
}
