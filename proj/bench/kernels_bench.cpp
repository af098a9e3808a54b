// Serial versus OpenMP timings of the data-parallel kernels.

#include <benchmark/benchmark.h>

#include "pso/kernels.hpp"
#include "pso/metrics.hpp"
#include "pso/rng.hpp"

namespace {

using pso::kernels::Exec;

std::vector<pso::Vec> points(std::size_t n, std::size_t dim) {
  pso::RngStream rng(1);
  std::vector<pso::Vec> pts(n, pso::Vec(dim));
  for (auto& p : pts)
    for (auto& v : p) v = rng.uniform(-5, 5);
  return pts;
}

std::vector<std::vector<pso::Trace>> traces(std::size_t strategies, std::size_t instances) {
  pso::RngStream rng(2);
  std::vector<std::vector<pso::Trace>> out(strategies, std::vector<pso::Trace>(instances));
  for (auto& row : out)
    for (auto& t : row) {
      double best = 1e6;
      for (std::size_t e = 75; e <= 75'000; e += 75) {
        if (rng.uniform() < 0.2) best *= rng.uniform(0.5, 1.0);
        t.record(e, best);
      }
    }
  return out;
}

void BM_PairwiseDistances(benchmark::State& state, Exec exec) {
  const auto pts = points(static_cast<std::size_t>(state.range(0)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(pso::kernels::pairwise_sq_distances(pts, exec));
}

void BM_AvgRanks(benchmark::State& state, Exec exec) {
  const auto t = traces(13, static_cast<std::size_t>(state.range(0)));
  const auto grid = pso::geometric_grid(75, 75'000, 500);
  for (auto _ : state) benchmark::DoNotOptimize(pso::kernels::avg_ranks(t, grid, exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_PairwiseDistances, serial, Exec::serial)->Arg(75)->Arg(300);
BENCHMARK_CAPTURE(BM_PairwiseDistances, parallel, Exec::parallel)->Arg(75)->Arg(300);
BENCHMARK_CAPTURE(BM_AvgRanks, serial, Exec::serial)->Arg(65)->Arg(325);
BENCHMARK_CAPTURE(BM_AvgRanks, parallel, Exec::parallel)->Arg(65)->Arg(325);

BENCHMARK_MAIN();
