#pragma once

// First-order stability of the deterministic single-particle recurrence
//   x(t+1) = (1 + omega - phi) x(t) - omega x(t-1) + phi p.

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

namespace pso {

struct StrategySpec;

struct RecurrenceParams {
  double omega = 0;
  double phi = 0;
  double p = 0;
};

struct Eigenvalues {
  std::complex<double> l1;
  std::complex<double> l2;

  double max_modulus() const;
};

Eigenvalues stability_eigenvalues(const RecurrenceParams& params);

enum class Stability { stable, marginal, unstable };

std::string_view to_string(Stability s);

inline constexpr double kMarginalBand = 1e-12;

/// stable when the largest root modulus is below 1 - 1e-12, marginal within
/// 1e-12 of 1, unstable otherwise.
Stability classify_stability(const RecurrenceParams& params);

struct Trajectory {
  std::vector<double> x;   // x(0), x(1), ..., x(steps) unless truncated
  bool truncated = false;  // stopped once |x| exceeded kDivergenceLimit
};

inline constexpr double kDivergenceLimit = 1e300;

/// Iterates the recurrence from (x0, x1) for `steps` further steps.
/// Throws std::invalid_argument when steps < 1.
Trajectory recurrence_trace(const RecurrenceParams& params, double x0, double x1,
                            std::size_t steps);

/// x(t) = k1 + k2 l1^t + k3 l2^t (distinct roots) or
/// x(t) = k1 + (k2 + k3 t) l^t (repeated root), fitted to x(0), x(1).
struct ClosedForm {
  Eigenvalues roots;
  double k1 = 0;
  std::complex<double> k2;
  std::complex<double> k3;
  bool repeated = false;

  double at(std::size_t t) const;
};

/// Requires phi != 0 (otherwise 1 is a root and p is not the fixed point).
ClosedForm closed_form(const RecurrenceParams& params, double x0, double x1);

struct StabilityCell {
  double omega = 0;
  double phi = 0;
  double max_modulus = 0;
  Stability stability = Stability::stable;
};

/// Classification over [omega_lo, omega_hi] x [phi_lo, phi_hi] with the
/// given step; rows by omega, phi fastest. Grid values are lo + k*step.
std::vector<StabilityCell> stability_grid(double omega_lo, double omega_hi, double phi_lo,
                                          double phi_hi, double step = 0.01);

/// Deterministic approximation of a strategy's recurrence at run progress t:
/// omega from its inertia schedule, phi = (sum of acceleration gains) / 2.
RecurrenceParams recurrence_from_spec(const StrategySpec& spec, double progress);

}  // namespace pso
