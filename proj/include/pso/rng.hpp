#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace pso {

/// Mixes a label into a seed (FNV-1a over the label, then splitmix64).
std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) noexcept;

/// Seeded generator. Identical seed and call sequence give identical draws;
/// split() derives a child from the seed alone, so children do not depend on
/// how far the parent has advanced.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  RngStream split(std::string_view label) const;

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = index(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace pso
