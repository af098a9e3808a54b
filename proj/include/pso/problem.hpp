#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pso {

using Vec = std::vector<double>;
using Objective = std::function<double(std::span<const double>)>;

/// A box-bounded minimization problem.
struct Problem {
  std::string name;
  std::size_t dim = 0;
  Vec lower;
  Vec upper;
  Objective objective;
  std::optional<double> f_star;

  /// Throws ConfigError unless dim > 0, bounds have length dim with
  /// lower[d] < upper[d], and an objective is set.
  void validate() const;

  bool contains(std::span<const double> x) const;
};

}  // namespace pso
