#include "pso/strategy.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "pso/errors.hpp"

namespace pso {

namespace {

struct KindInfo {
  StrategyKind kind;
  std::string_view name;
  std::string_view short_name;
};

constexpr std::array<KindInfo, 19> kKinds{{
    {StrategyKind::pso_ldw, "pso_ldw", "pso_ldw"},
    {StrategyKind::pso_tvac, "pso_tvac", "pso_tvac"},
    {StrategyKind::constriction, "constriction", "constriction"},
    {StrategyKind::fips, "fips", "FIS"},
    {StrategyKind::lips, "lips", "LIS"},
    {StrategyKind::cl, "cl", "CL"},
    {StrategyKind::cl_gbest, "cl_gbest", "cl_gbest"},
    {StrategyKind::dnl, "dnl", "DNL"},
    {StrategyKind::fdr, "fdr", "fdr"},
    {StrategyKind::dls, "dls", "DLS"},
    {StrategyKind::dms, "dms", "DMS"},
    {StrategyKind::sl, "sl", "SL"},
    {StrategyKind::mfl, "mfl", "MFL"},
    {StrategyKind::al, "al", "AL"},
    {StrategyKind::mal, "mal", "MAL"},
    {StrategyKind::upso, "upso", "UL"},
    {StrategyKind::epso, "epso", "EL"},
    {StrategyKind::sdl, "sdl", "SDL"},
    {StrategyKind::ol, "ol", "ol"},
}};

const KindInfo& info(StrategyKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k;
  }
  throw ConfigError("unknown strategy kind");
}

using Params = std::map<std::string, double>;

// Inertia schedule shared by most kinds.
Params with_inertia(Params p, double start = 0.9, double end = 0.4) {
  p.emplace("w_start", start);
  p.emplace("w_end", end);
  return p;
}

Params build_defaults(StrategyKind kind) {
  constexpr double kClC = 1.49445;
  switch (kind) {
    case StrategyKind::pso_ldw:
      return with_inertia({{"c1", 2.0}, {"c2", 2.0}, {"vmax", 0.5}});
    case StrategyKind::pso_tvac:
      return with_inertia({{"c1_start", 2.5}, {"c1_end", 0.5}, {"c2_start", 0.5},
                           {"c2_end", 2.5}, {"vmax", 0.5}});
    case StrategyKind::constriction:
      // target: 0 = gbest, 1 = ring lbest
      return {{"c1", 2.05}, {"c2", 2.05}, {"target", 0}, {"radius", 1}, {"stochastic", 1},
              {"vmax", 0}};
    case StrategyKind::fips:
      return {{"c_max", 4.1}, {"n_g", 2}, {"vmax", 0}};
    case StrategyKind::lips:
      return {{"c_max", 4.1}, {"n_g", 3}, {"vmax", 0}};
    case StrategyKind::cl:
      return with_inertia({{"c", kClC}, {"refresh_gap", 5}, {"alpha", 0.05}, {"beta", 0.45},
                           {"guard", 1}, {"vmax", 0.2}},
                          0.9, 0.2);
    case StrategyKind::cl_gbest:
      // prob_form: 1 = exponential ranking, 0 = linear
      return with_inertia({{"c1", kClC}, {"c2", kClC}, {"refresh_gap", 5}, {"alpha", 0.05},
                           {"beta", 0.45}, {"prob_form", 1}, {"guard", 1}, {"vmax", 0.2}});
    case StrategyKind::dnl:
      // neighborhood_size 0 = ceil(N/5)
      return with_inertia({{"c1", kClC}, {"c2", kClC}, {"refresh_gap", 5}, {"alpha", 0.05},
                           {"beta", 0.45}, {"prob_form", 0}, {"guard", 1},
                           {"neighborhood_size", 0}, {"regroup_period", 5}, {"vmax", 0.2}});
    case StrategyKind::fdr:
      return with_inertia({{"w1", 1}, {"w2", 1}, {"w3", 2}, {"vmax", 0.5}});
    case StrategyKind::dls:
      return with_inertia({{"c1", kClC}, {"c2", kClC}, {"vmax", 0.2}});
    case StrategyKind::dms:
      return with_inertia({{"c1", kClC}, {"c2", kClC}, {"subswarm_size", 3},
                           {"regroup_period", 5}, {"vmax", 0.2}},
                          0.729, 0.729);
    case StrategyKind::sl:
      // epsilon = beta * D / 100; learning probability exponent alpha * ln(ceil(D / 100))
      return {{"alpha", 0.5}, {"beta", 0.01}};
    case StrategyKind::mfl:
      return with_inertia({{"c1", 1.35}, {"c2", 1.35}, {"c3", 1.35}, {"ring_size", 3},
                           {"slope", 0.5}, {"vmax", 0.2}});
    case StrategyKind::al:
      return with_inertia({{"eta", 1.496}, {"gamma", 0.01}, {"alpha_w", 0.5},
                           {"update_period", 10}, {"vmax", 0.2}});
    case StrategyKind::mal:
      return with_inertia({{"groups", 4}, {"vmax", 0.2}});
    case StrategyKind::upso:
      return {{"u", 0.5}, {"c1", 2.05}, {"c2", 2.05}, {"radius", 1}, {"vmax", 0}};
    case StrategyKind::epso:
      return {{"elite_fraction", 0.4}, {"learning_period", 20}, {"epsilon", 0.01},
              {"per_group_assignment", 0}};
    case StrategyKind::sdl:
      // fixed_member -1 = adaptive; 0..3 pins cl, upso, pso_ldw, lips
      return {{"cl_fraction", 0.3}, {"stages", 4}, {"epsilon", 0.01}, {"fixed_member", -1}};
    case StrategyKind::ol:
      return with_inertia({{"c", 2.0}, {"stall_trigger", 5}, {"radius", 1}, {"vmax", 0.2}});
  }
  throw ConfigError("unknown strategy kind");
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view kind_name(StrategyKind kind) { return info(kind).name; }
std::string_view short_name(StrategyKind kind) { return info(kind).short_name; }

const std::map<std::string, double>& default_params(StrategyKind kind) {
  static const auto table = [] {
    std::array<Params, kKinds.size()> t;
    for (const auto& k : kKinds) t[static_cast<std::size_t>(k.kind)] = build_defaults(k.kind);
    return t;
  }();
  return table.at(static_cast<std::size_t>(kind));
}

double StrategySpec::get(std::string_view name) const {
  const std::string key(name);
  if (auto it = params.find(key); it != params.end()) return it->second;
  const auto& defaults = default_params(kind);
  if (auto it = defaults.find(key); it != defaults.end()) return it->second;
  throw ConfigError("strategy '" + std::string(kind_name(kind)) + "' has no parameter '" + key +
                    "'");
}

StrategySpec StrategySpec::with(std::string_view name, double value) const {
  StrategySpec out = *this;
  out.params[std::string(name)] = value;
  return out;
}

StrategySpec default_spec(StrategyKind kind) { return {kind, default_params(kind)}; }

void validate_spec(const StrategySpec& spec) {
  const std::string who(kind_name(spec.kind));
  const auto& defaults = default_params(spec.kind);
  for (const auto& [name, value] : spec.params) {
    if (spec.kind == StrategyKind::mal &&
        (name == "c" || name == "c1" || name == "c2" || name == "c3" || name == "eta")) {
      throw ConfigError("mal takes no acceleration coefficients (got '" + name + "')");
    }
    if (!defaults.contains(name)) {
      std::string known;
      for (const auto& [k, v] : defaults) known += (known.empty() ? "" : ", ") + k;
      throw ConfigError(who + ": unknown parameter '" + name + "' (valid: " + known + ")");
    }
    if (!std::isfinite(value)) throw ConfigError(who + ": parameter '" + name + "' not finite");
  }
  auto unit = [&](const char* name) {
    if (!defaults.contains(name)) return;
    const double v = spec.get(name);
    if (v < 0.0 || v > 1.0) {
      throw ConfigError(who + ": '" + name + "' must lie in [0, 1]");
    }
  };
  for (const char* name : {"alpha", "beta", "u", "gamma", "alpha_w", "elite_fraction",
                           "cl_fraction", "slope"}) {
    if (spec.kind == StrategyKind::sl && std::string_view(name) == "alpha") continue;
    unit(name);
  }
  if (defaults.contains("alpha") && defaults.contains("beta") && spec.kind != StrategyKind::sl &&
      spec.get("alpha") + spec.get("beta") > 1.0) {
    throw ConfigError(who + ": alpha + beta must not exceed 1");
  }
  if (spec.kind == StrategyKind::al && spec.get("gamma") * 4.0 > 1.0) {
    throw ConfigError("al: gamma must not exceed 1/4");
  }
  auto at_least = [&](const char* name, double lo) {
    if (defaults.contains(name) && spec.get(name) < lo) {
      throw ConfigError(who + ": '" + std::string(name) + "' must be at least " +
                        std::to_string(lo));
    }
  };
  at_least("n_g", 1);
  at_least("subswarm_size", 1);
  at_least("regroup_period", 1);
  at_least("update_period", 1);
  at_least("learning_period", 1);
  at_least("groups", 1);
  at_least("stages", 1);
  at_least("ring_size", 1);
  at_least("vmax", 0);
  if (spec.kind == StrategyKind::constriction || spec.kind == StrategyKind::upso) {
    if (spec.get("c1") + spec.get("c2") <= 4.0) {
      throw ConfigError(who + ": c1 + c2 must exceed 4 for the constriction factor");
    }
  }
  if ((spec.kind == StrategyKind::fips || spec.kind == StrategyKind::lips) &&
      spec.get("c_max") <= 4.0) {
    throw ConfigError(who + ": c_max must exceed 4 for the constriction factor");
  }
  if (spec.kind == StrategyKind::sdl) {
    const double m = spec.get("fixed_member");
    if (m != -1 && (m < 0 || m > 3 || m != std::floor(m))) {
      throw ConfigError("sdl: fixed_member must be -1 or an integer in [0, 3]");
    }
  }
}

const std::vector<std::string>& registry_names() {
  static const std::vector<std::string> names{"FIS", "DMS", "CL",  "DNL", "LIS", "SL", "EL",
                                              "DLS", "UL",  "MFL", "AL",  "MAL", "SDL"};
  return names;
}

StrategySpec parse_strategy(std::string_view name) {
  const std::string key = lower(name);
  for (const auto& k : kKinds) {
    if (lower(k.short_name) == key || k.name == key) return default_spec(k.kind);
  }
  std::string valid;
  for (const auto& n : registry_names()) valid += (valid.empty() ? "" : ", ") + n;
  for (const auto& k : kKinds) {
    if (k.short_name == k.name) valid += ", " + std::string(k.name);
  }
  throw ConfigError("unknown strategy '" + std::string(name) + "' (valid: " + valid + ")");
}

double schedule(double start, double end, double progress) {
  const double t = std::clamp(progress, 0.0, 1.0);
  return start + (end - start) * t;
}

double constriction_chi(double c_total) {
  if (c_total <= 4.0) throw ConfigError("constriction factor needs a total gain above 4");
  return 2.0 / std::fabs(2.0 - c_total - std::sqrt(c_total * c_total - 4.0 * c_total));
}

void Strategy::initialize(SwarmState&, StepContext&, RngStream&) {}
void Strategy::prepare(SwarmState&, StepContext&, RngStream&) {}

std::vector<Proposal> Strategy::step(SwarmState& state, StepContext& ctx, RngStream& rng) {
  prepare(state, ctx, rng);
  std::vector<Proposal> out;
  out.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) out.push_back(propose(state, i, ctx, rng));
  return out;
}

void Strategy::observe(SwarmState&, std::span<const Outcome>, StepContext&) {}

std::optional<std::vector<Vec>> Strategy::search_lengths(const SwarmState&) const {
  return std::nullopt;
}

}  // namespace pso
