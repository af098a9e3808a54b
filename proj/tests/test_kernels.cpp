#include <catch_amalgamated.hpp>

#include <atomic>
#include <stdexcept>

#include "pso/kernels.hpp"
#include "pso/metrics.hpp"
#include "pso/rng.hpp"

using namespace pso;
using kernels::Exec;

TEST_CASE("pairwise distances agree across execution paths") {
  RngStream rng(1);
  std::vector<Vec> pts(60, Vec(13));
  for (auto& p : pts)
    for (auto& v : p) v = rng.uniform(-3, 3);
  const auto s = kernels::pairwise_sq_distances(pts, Exec::serial);
  const auto p = kernels::pairwise_sq_distances(pts, Exec::parallel);
  REQUIRE(s == p);
  REQUIRE(s.size() == 3600);
  for (std::size_t i = 0; i < 60; ++i) {
    REQUIRE(s[i * 60 + i] == 0.0);
    for (std::size_t j = 0; j < 60; ++j) REQUIRE(s[i * 60 + j] == s[j * 60 + i]);
  }
  double d = 0;
  for (std::size_t k = 0; k < 13; ++k) d += (pts[3][k] - pts[7][k]) * (pts[3][k] - pts[7][k]);
  REQUIRE(s[3 * 60 + 7] == Catch::Approx(d).epsilon(1e-14));
}

TEST_CASE("average rank kernel agrees with the metric and across paths") {
  RngStream rng(2);
  std::vector<std::vector<Trace>> traces(5, std::vector<Trace>(20));
  for (auto& row : traces)
    for (auto& t : row) {
      double best = 100;
      for (std::size_t e = 1; e <= 1000; e += 1 + rng.index(40)) {
        best -= rng.uniform();
        t.record(e, best);
      }
    }
  const auto grid = geometric_grid(10, 1000, 50);
  const auto s = kernels::avg_ranks(traces, grid, Exec::serial);
  REQUIRE(s == kernels::avg_ranks(traces, grid, Exec::parallel));
  REQUIRE(s == avg_ranks_trace(traces, grid));
}

TEST_CASE("for_each_cell visits every index once and propagates errors") {
  for (auto exec : {Exec::serial, Exec::parallel}) {
    std::vector<std::atomic<int>> hits(200);
    kernels::for_each_cell(hits.size(), [&](std::size_t k) { ++hits[k]; }, exec);
    for (auto& h : hits) REQUIRE(h.load() == 1);

    std::atomic<int> done{0};
    REQUIRE_THROWS_AS(kernels::for_each_cell(
                          50,
                          [&](std::size_t k) {
                            if (k == 17) throw std::runtime_error("cell failed");
                            ++done;
                          },
                          exec, 2),
                      std::runtime_error);
  }
  REQUIRE(kernels::max_threads() >= 1);
}
