#include "pso/problem.hpp"

#include <string>

#include "pso/errors.hpp"

namespace pso {

void Problem::validate() const {
  if (dim == 0) throw ConfigError("problem '" + name + "': dimension must be positive");
  if (lower.size() != dim || upper.size() != dim) {
    throw ConfigError("problem '" + name + "': bounds must have " + std::to_string(dim) +
                      " entries");
  }
  for (std::size_t d = 0; d < dim; ++d) {
    if (!(lower[d] < upper[d])) {
      throw ConfigError("problem '" + name + "': lower[" + std::to_string(d) +
                        "] must be below upper[" + std::to_string(d) + "]");
    }
  }
  if (!objective) throw ConfigError("problem '" + name + "': no objective");
}

bool Problem::contains(std::span<const double> x) const {
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (x[d] < lower[d] || x[d] > upper[d]) return false;
  }
  return true;
}

}  // namespace pso
