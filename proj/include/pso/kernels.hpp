#pragma once

// Data-parallel kernels. Each has a serial reference path; the OpenMP path
// must produce bitwise-identical results (tests compare the two).

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include "pso/optimizer.hpp"
#include "pso/problem.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace pso::kernels {

enum class Exec { serial, parallel };

/// Number of OpenMP threads available (1 without OpenMP).
int max_threads();

/// Row-major n x n matrix of squared Euclidean distances.
std::vector<double> pairwise_sq_distances(std::span<const Vec> points, Exec exec);

/// Mean rank per strategy per grid point; see avg_ranks_trace().
std::vector<Vec> avg_ranks(const std::vector<std::vector<Trace>>& traces,
                           std::span<const std::size_t> grid, Exec exec);

/// Calls fn(k) for k in [0, n). The parallel path schedules dynamically over
/// `threads` threads (0 = all); the first exception thrown by any call is
/// rethrown after the loop.
template <class Fn>
void for_each_cell(std::size_t n, Fn&& fn, Exec exec, int threads = 0) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
#if defined(_OPENMP)
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (long long k = 0; k < static_cast<long long>(n); ++k) {
    try {
      fn(static_cast<std::size_t>(k));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
#else
  (void)threads;
  for (std::size_t k = 0; k < n; ++k) {
    try {
      fn(k);
    } catch (...) {
      if (!error) error = std::current_exception();
    }
  }
#endif
  if (error) std::rethrow_exception(error);
}

}  // namespace pso::kernels
