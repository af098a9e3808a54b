#include "pso/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pso/errors.hpp"
#include "pso/strategy.hpp"

namespace pso {

using cplx = std::complex<double>;

double Eigenvalues::max_modulus() const { return std::max(std::abs(l1), std::abs(l2)); }

Eigenvalues stability_eigenvalues(const RecurrenceParams& q) {
  const double b = 1.0 + q.omega - q.phi;
  const cplx gamma = std::sqrt(cplx(b * b - 4.0 * q.omega, 0.0));
  return {(b + gamma) / 2.0, (b - gamma) / 2.0};
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::marginal: return "marginal";
    case Stability::unstable: return "unstable";
  }
  return "?";
}

namespace {

Stability classify(double modulus) {
  if (modulus < 1.0 - kMarginalBand) return Stability::stable;
  if (modulus <= 1.0 + kMarginalBand) return Stability::marginal;
  return Stability::unstable;
}

}  // namespace

Stability classify_stability(const RecurrenceParams& params) {
  return classify(stability_eigenvalues(params).max_modulus());
}

Trajectory recurrence_trace(const RecurrenceParams& q, double x0, double x1, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("recurrence_trace needs at least one step");
  Trajectory out;
  out.x.reserve(steps + 2);
  out.x.push_back(x0);
  out.x.push_back(x1);
  const double b = 1.0 + q.omega - q.phi;
  for (std::size_t t = 1; t < steps; ++t) {
    const double next = b * out.x[t] - q.omega * out.x[t - 1] + q.phi * q.p;
    if (!std::isfinite(next) || std::fabs(next) > kDivergenceLimit) {
      out.truncated = true;
      break;
    }
    out.x.push_back(next);
  }
  return out;
}

ClosedForm closed_form(const RecurrenceParams& q, double x0, double x1) {
  if (q.phi == 0.0) throw std::invalid_argument("closed form needs phi != 0");
  ClosedForm cf;
  cf.roots = stability_eigenvalues(q);
  cf.k1 = q.p;
  const cplx e0(x0 - q.p), e1(x1 - q.p);
  const cplx l1 = cf.roots.l1, l2 = cf.roots.l2;
  if (std::abs(l1 - l2) > 1e-12 * std::max(1.0, std::abs(l1))) {
    cf.k2 = (e1 - l2 * e0) / (l1 - l2);
    cf.k3 = (l1 * e0 - e1) / (l1 - l2);
  } else {
    cf.repeated = true;
    const cplx l = 0.5 * (l1 + l2);
    cf.k2 = e0;
    cf.k3 = std::abs(l) > 0.0 ? e1 / l - e0 : cplx(0.0);
  }
  return cf;
}

double ClosedForm::at(std::size_t t) const {
  const double td = static_cast<double>(t);
  if (!repeated) {
    return k1 + (k2 * std::pow(roots.l1, td) + k3 * std::pow(roots.l2, td)).real();
  }
  const cplx l = 0.5 * (roots.l1 + roots.l2);
  if (std::abs(l) == 0.0) return t == 0 ? k1 + k2.real() : k1;
  return k1 + ((k2 + k3 * td) * std::pow(l, td)).real();
}

std::vector<StabilityCell> stability_grid(double omega_lo, double omega_hi, double phi_lo,
                                          double phi_hi, double step) {
  if (!(step > 0.0) || omega_hi < omega_lo || phi_hi < phi_lo) {
    throw ConfigError("stability grid needs lo <= hi and a positive step");
  }
  const auto count = [&](double lo, double hi) {
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  };
  const std::size_t nw = count(omega_lo, omega_hi);
  const std::size_t np = count(phi_lo, phi_hi);
  std::vector<StabilityCell> cells;
  cells.reserve(nw * np);
  for (std::size_t i = 0; i < nw; ++i) {
    const double omega = omega_lo + static_cast<double>(i) * step;
    for (std::size_t j = 0; j < np; ++j) {
      const double phi = phi_lo + static_cast<double>(j) * step;
      const double m = stability_eigenvalues({omega, phi, 0.0}).max_modulus();
      cells.push_back({omega, phi, m, classify(m)});
    }
  }
  return cells;
}

RecurrenceParams recurrence_from_spec(const StrategySpec& spec, double progress) {
  const auto inertia = [&] {
    return schedule(spec.get("w_start"), spec.get("w_end"), progress);
  };
  switch (spec.kind) {
    case StrategyKind::pso_ldw:
    case StrategyKind::dls:
    case StrategyKind::dnl:
    case StrategyKind::cl_gbest:
    case StrategyKind::dms:
      return {inertia(), (spec.get("c1") + spec.get("c2")) / 2.0, 0.0};
    case StrategyKind::pso_tvac:
      return {inertia(),
              (schedule(spec.get("c1_start"), spec.get("c1_end"), progress) +
               schedule(spec.get("c2_start"), spec.get("c2_end"), progress)) / 2.0,
              0.0};
    case StrategyKind::constriction:
    case StrategyKind::upso: {
      const double c = spec.get("c1") + spec.get("c2");
      const double chi = constriction_chi(c);
      return {chi, chi * c / 2.0, 0.0};
    }
    case StrategyKind::fips:
    case StrategyKind::lips: {
      const double c = spec.get("c_max");
      const double chi = constriction_chi(c);
      return {chi, chi * c / 2.0, 0.0};
    }
    case StrategyKind::cl:
    case StrategyKind::ol:
      return {inertia(), spec.get("c") / 2.0, 0.0};
    case StrategyKind::fdr:
      return {inertia(), (spec.get("w1") + spec.get("w2") + spec.get("w3")) / 2.0, 0.0};
    case StrategyKind::mfl:
      return {inertia(), (spec.get("c1") + spec.get("c2") + spec.get("c3")) / 2.0, 0.0};
    case StrategyKind::al:
      return {inertia(), spec.get("eta") / 2.0, 0.0};
    case StrategyKind::mal:
      return {inertia(), 1.0, 0.0};
    case StrategyKind::sl:
      return {0.5, (1.0 + spec.get("beta")) / 2.0, 0.0};
    case StrategyKind::epso:
    case StrategyKind::sdl:
      break;
  }
  throw ConfigError("strategy '" + std::string(kind_name(spec.kind)) +
                    "' mixes several update rules and has no single recurrence");
}

}  // namespace pso
