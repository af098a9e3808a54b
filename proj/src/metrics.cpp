#include "pso/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pso/kernels.hpp"

namespace pso {

double population_diversity(std::span<const Vec> positions) {
  if (positions.empty()) throw std::invalid_argument("diversity of an empty population");
  const std::size_t n = positions.size();
  const std::size_t dim = positions.front().size();
  // Sums run over sorted terms so particle order cannot change the result.
  auto sorted_sum = [](Vec& terms) {
    std::sort(terms.begin(), terms.end());
    return std::accumulate(terms.begin(), terms.end(), 0.0);
  };
  Vec centroid(dim), column(n);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < n; ++i) column[i] = positions[i][d];
    centroid[d] = sorted_sum(column) / static_cast<double>(n);
  }
  Vec dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double e = positions[i][d] - centroid[d];
      sq += e * e;
    }
    dist[i] = std::sqrt(sq);
  }
  return sorted_sum(dist) / static_cast<double>(n);
}

VolumeSummary potential_volume(std::span<const Vec> lengths) {
  VolumeSummary out;
  out.log_volume.reserve(lengths.size());
  double peak = -kInf;
  for (const auto& row : lengths) {
    double log_v = 0.0;
    for (double r : row) {
      if (r < 0.0 || std::isnan(r)) throw std::invalid_argument("negative search length");
      log_v += std::log(r);  // log(0) = -inf
    }
    out.log_volume.push_back(log_v);
    peak = std::max(peak, log_v);
  }
  if (lengths.empty() || peak == -kInf) {
    out.log_mean_volume = -kInf;
    out.mean_volume = 0.0;
    return out;
  }
  double acc = 0.0;
  for (double v : out.log_volume) acc += std::exp(v - peak);
  out.log_mean_volume = peak + std::log(acc / static_cast<double>(lengths.size()));
  out.mean_volume = std::exp(out.log_mean_volume);
  out.representable = std::isfinite(out.mean_volume) && out.mean_volume > 0.0;
  return out;
}

namespace {

void require_same(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("search length operands differ in dimension");
}

}  // namespace

Vec al_lengths(std::span<const double> x, std::span<const double> selected_best) {
  require_same(x.size(), selected_best.size());
  Vec r(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) r[d] = std::fabs(selected_best[d] - x[d]);
  return r;
}

Vec cl_lengths(std::span<const double> x, std::span<const double> exemplar) {
  require_same(x.size(), exemplar.size());
  Vec r(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    r[d] = std::max(exemplar[d], x[d]) - std::min(exemplar[d], x[d]);
  }
  return r;
}

Vec sl_lengths(std::span<const double> x, std::span<const double> demonstrator,
               std::span<const double> mean) {
  require_same(x.size(), demonstrator.size());
  require_same(x.size(), mean.size());
  Vec r(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    r[d] = std::fabs(demonstrator[d] - x[d]) + std::fabs(mean[d] - x[d]);
  }
  return r;
}

Vec lis_lengths(std::span<const double> x, std::span<const double> pbar) {
  return al_lengths(x, pbar);
}

Vec dnl_lengths(std::span<const double> x, std::span<const double> exemplar,
                std::span<const double> gbest) {
  require_same(x.size(), exemplar.size());
  require_same(x.size(), gbest.size());
  Vec r(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    r[d] = std::fabs(exemplar[d] - x[d]) + std::fabs(gbest[d] - x[d]);
  }
  return r;
}

Vec dms_lengths(std::span<const double> x, std::span<const double> pbest,
                std::span<const double> lbest) {
  return dnl_lengths(x, pbest, lbest);
}

Vec mfl_lengths(std::span<const double> x, std::span<const double> pbest,
                std::span<const double> lbest, std::span<const double> gbest,
                std::span<const double> forgetting) {
  require_same(x.size(), pbest.size());
  require_same(x.size(), lbest.size());
  require_same(x.size(), gbest.size());
  require_same(x.size(), forgetting.size());
  Vec r(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double keep = 1.0 - forgetting[d];
    r[d] = std::fabs(pbest[d] - x[d]) + std::fabs(keep * lbest[d] - x[d]) +
           std::fabs(keep * gbest[d] - x[d]);
  }
  return r;
}

PiWeights pi_case(int which, double omega) {
  if (omega < 0.0 || omega > 1.0) throw std::invalid_argument("PI omega outside [0, 1]");
  const double rest = (1.0 - omega) / 2.0;
  switch (which) {
    case 1: return {omega, rest, rest};
    case 2: return {rest, omega, rest};
    case 3: return {rest, rest, omega};
    default: throw std::invalid_argument("PI weighting case must be 1, 2 or 3");
  }
}

namespace {

double ratio(double num, double den) {
  if (den == 0.0) {
    if (num == 0.0) return 1.0;
    throw std::invalid_argument("PI: minimum exceeds a zero average");
  }
  return num / den;
}

}  // namespace

double performance_index(std::span<const ProblemStats> results, std::span<const ProblemMins> mins,
                         PiWeights w) {
  if (results.size() != mins.size() || results.empty()) {
    throw std::invalid_argument("PI: results and minima must be non-empty and aligned");
  }
  // Dividing by the computed sum keeps a perfect score at exactly 1.
  const double wsum = w.k1 + w.k2 + w.k3;
  if (std::fabs(wsum - 1.0) > 1e-12) throw std::invalid_argument("PI weights must sum to 1");
  double total = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.runs <= 0) throw std::invalid_argument("PI: total runs must be positive");
    total += (w.k1 * (r.successes / r.runs) + w.k2 * ratio(mins[i].min_time, r.avg_time) +
             w.k3 * ratio(mins[i].min_fitness, r.avg_fitness)) / wsum;
  }
  return total / static_cast<double>(results.size());
}

std::vector<std::size_t> geometric_grid(std::size_t first, std::size_t last, std::size_t points) {
  if (first == 0 || last < first || points == 0) {
    throw std::invalid_argument("geometric grid needs 0 < first <= last and points > 0");
  }
  std::vector<std::size_t> grid;
  if (points == 1 || first == last) return {last};
  const double lf = std::log(static_cast<double>(first));
  const double ll = std::log(static_cast<double>(last));
  for (std::size_t k = 0; k < points; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(points - 1);
    auto v = static_cast<std::size_t>(std::llround(std::exp(lf + t * (ll - lf))));
    v = std::clamp(v, first, last);
    if (k == points - 1) v = last;
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

std::vector<Vec> avg_ranks_trace(const std::vector<std::vector<Trace>>& traces,
                                 std::span<const std::size_t> grid) {
  return kernels::avg_ranks(traces, grid, kernels::Exec::serial);
}

}  // namespace pso
