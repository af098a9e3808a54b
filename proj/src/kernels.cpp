#include "pso/kernels.hpp"

#include <stdexcept>

#include "pso/stats.hpp"

namespace pso::kernels {

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

void distance_row(std::span<const Vec> points, std::size_t i, double* row) {
  const auto& a = points[i];
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto& b = points[j];
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    row[j] = s;
  }
}

}  // namespace

std::vector<double> pairwise_sq_distances(std::span<const Vec> points, Exec exec) {
  const std::size_t n = points.size();
  std::vector<double> out(n * n);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) distance_row(points, i, out.data() + i * n);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    distance_row(points, static_cast<std::size_t>(i), out.data() + static_cast<std::size_t>(i) * n);
  }
  return out;
}

namespace {

/// Best-so-far of one trace at every grid point (carry-forward).
Vec sample_on_grid(const Trace& trace, std::span<const std::size_t> grid) {
  Vec out(grid.size(), kInf);
  const auto pts = trace.points();
  std::size_t k = 0;
  double current = kInf;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    while (k < pts.size() && pts[k].eval <= grid[g]) current = pts[k++].best_f;
    out[g] = current;
  }
  return out;
}

}  // namespace

std::vector<Vec> avg_ranks(const std::vector<std::vector<Trace>>& traces,
                           std::span<const std::size_t> grid, Exec exec) {
  if (traces.empty() || traces.front().empty()) {
    throw std::invalid_argument("AvgRanks needs at least one strategy and one instance");
  }
  const std::size_t s_count = traces.size();
  const std::size_t k_count = traces.front().size();
  for (const auto& row : traces) {
    if (row.size() != k_count) throw std::invalid_argument("AvgRanks: ragged trace set");
  }
  // sampled[s * k_count + k][g]
  std::vector<Vec> sampled(s_count * k_count);
  for_each_cell(
      s_count * k_count,
      [&](std::size_t c) { sampled[c] = sample_on_grid(traces[c / k_count][c % k_count], grid); },
      exec);

  std::vector<Vec> ranks(s_count, Vec(grid.size(), 0.0));
  auto rank_column = [&](std::size_t g) {
    Vec sum(s_count, 0.0);
    Vec values(s_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      for (std::size_t s = 0; s < s_count; ++s) values[s] = sampled[s * k_count + k][g];
      const Vec r = average_ranks(values);
      for (std::size_t s = 0; s < s_count; ++s) sum[s] += r[s];
    }
    for (std::size_t s = 0; s < s_count; ++s) ranks[s][g] = sum[s] / static_cast<double>(k_count);
  };
  for_each_cell(grid.size(), rank_column, exec);
  return ranks;
}

}  // namespace pso::kernels
