#include "pso/rng.hpp"

namespace pso {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(splitmix64(seed) ^ h);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngStream RngStream::split(std::string_view label) const {
  return RngStream(mix_seed(seed_, label));
}

double RngStream::uniform() { return unit_(engine_); }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }

double RngStream::normal() { return gauss_(engine_); }

std::size_t RngStream::index(std::size_t n) {
  if (n <= 1) return 0;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  return pick(engine_);
}

}  // namespace pso
