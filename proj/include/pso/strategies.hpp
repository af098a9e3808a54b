#pragma once

// Concrete learning strategies. Construct through make_strategy(); the
// classes are public so tests can inspect strategy-owned state.

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "pso/learning.hpp"
#include "pso/strategy.hpp"

namespace pso {

/// pso_ldw and pso_tvac.
class InertiaPso : public Strategy {
 public:
  explicit InertiaPso(StrategySpec spec);
  StrategyKind kind() const override { return spec_.kind; }
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;

 private:
  StrategySpec spec_;
};

class Constriction : public Strategy {
 public:
  explicit Constriction(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::constriction; }
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  double chi() const { return chi_; }

 private:
  StrategySpec spec_;
  double chi_;
};

class Upso : public Strategy {
 public:
  explicit Upso(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::upso; }
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;

 private:
  StrategySpec spec_;
  double chi_;
};

class Fips : public Strategy {
 public:
  explicit Fips(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::fips; }
  void initialize(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  /// Weighted neighbourhood attractor from the last propose() for i.
  const Vec& attractor(std::size_t i) const { return pbar_.at(i); }

 private:
  StrategySpec spec_;
  double chi_;
  std::vector<Vec> pbar_;
};

class Lips : public Strategy {
 public:
  explicit Lips(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::lips; }
  void initialize(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  void prepare(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  std::optional<std::vector<Vec>> search_lengths(const SwarmState& state) const override;

  const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_.at(i); }
  const Vec& attractor(std::size_t i) const { return pbar_.at(i); }

 private:
  StrategySpec spec_;
  double chi_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<Vec> pbar_;
};

/// Comprehensive learning with per-dimension exemplars.
class Cl : public Strategy {
 public:
  explicit Cl(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::cl; }
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  std::optional<std::vector<Vec>> search_lengths(const SwarmState& state) const override;

  const std::vector<std::size_t>& sources(std::size_t i) const { return sources_.at(i); }
  std::size_t rebuilds(std::size_t i) const { return rebuilds_.at(i); }

 private:
  StrategySpec spec_;
  std::vector<std::vector<std::size_t>> sources_;
  std::vector<std::size_t> rebuilds_;
};

/// CL exemplar plus a gbest term, with tournaments inside dynamic
/// neighbourhoods (dnl) or the whole swarm (cl_gbest).
class Dnl : public Strategy {
 public:
  explicit Dnl(StrategySpec spec);
  StrategyKind kind() const override { return spec_.kind; }
  void initialize(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  void prepare(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  std::optional<std::vector<Vec>> search_lengths(const SwarmState& state) const override;

  const std::vector<std::size_t>& groups() const { return group_of_; }
  const std::vector<std::size_t>& sources(std::size_t i) const { return sources_.at(i); }

 private:
  void regroup(std::size_t n, RngStream& rng);

  StrategySpec spec_;
  std::size_t group_size_ = 0;
  std::vector<std::size_t> group_of_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::vector<std::size_t>> sources_;
};

class Fdr : public Strategy {
 public:
  explicit Fdr(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::fdr; }
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;

 private:
  StrategySpec spec_;
};

class Dls : public Strategy {
 public:
  explicit Dls(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::dls; }
  void prepare(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;

  struct Cache {
    DlsExemplar exemplar;
    double pbest_f = kInf;  // pbest fitness the exemplar was built from
    Vec gbest;              // gbest it was built against
    bool built = false;
  };
  const Cache& cache(std::size_t i) const { return cache_.at(i); }
  std::size_t builds() const { return builds_; }

 private:
  StrategySpec spec_;
  std::vector<Cache> cache_;
  std::size_t builds_ = 0;
};

class Dms : public Strategy {
 public:
  explicit Dms(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::dms; }
  void initialize(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  void prepare(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  std::optional<std::vector<Vec>> search_lengths(const SwarmState& state) const override;

 private:
  bool single_swarm(std::size_t n) const;

  StrategySpec spec_;
};

class Sl : public Strategy {
 public:
  explicit Sl(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::sl; }
  BoundsPolicy default_bounds() const override { return BoundsPolicy::clamp; }
  std::vector<Proposal> step(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  std::optional<std::vector<Vec>> search_lengths(const SwarmState& state) const override;

  /// Learning probability of the particle at sorted position `pos`
  /// (1 = worst) in a swarm of n particles in `dim` dimensions.
  double learning_probability(std::size_t pos, std::size_t n, std::size_t dim) const;
  double epsilon(std::size_t dim) const;

 private:
  StrategySpec spec_;
  std::vector<std::size_t> order_;  // worst first
  std::vector<std::size_t> position_of_;
  Vec mean_;
  std::vector<Vec> demonstrator_;
};

class Mfl : public Strategy {
 public:
  explicit Mfl(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::mfl; }
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  std::optional<std::vector<Vec>> search_lengths(const SwarmState& state) const override;

  /// Forgetting factor of a particle at position x.
  double forgetting(const SwarmState& state, std::span<const double> x,
                    const Problem& problem) const;

 private:
  StrategySpec spec_;
  std::vector<double> fg_;
  std::vector<std::size_t> lbest_;
};

class Al : public Strategy {
 public:
  enum Op : std::size_t { self = 0, neighbor = 1, random = 2, global = 3 };

  explicit Al(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::al; }
  void prepare(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  void observe(SwarmState& state, std::span<const Outcome> outcomes, StepContext& ctx) override;
  std::optional<std::vector<Vec>> search_lengths(const SwarmState& state) const override;

  const OperatorStats& stats() const { return stats_; }

 private:
  StrategySpec spec_;
  OperatorStats stats_;
  Vec vel_avg_;
  std::vector<std::size_t> op_;
  std::vector<double> parent_f_;
  std::vector<Vec> selected_;
  std::size_t generation_ = 0;
};

class Mal : public Strategy {
 public:
  explicit Mal(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::mal; }
  void prepare(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;

  /// Bands of particle indices, each ordered best first.
  const std::vector<std::vector<std::size_t>>& bands() const { return bands_; }

 private:
  StrategySpec spec_;
  std::vector<std::vector<std::size_t>> bands_;
  std::vector<std::size_t> band_of_;
  std::vector<std::size_t> rank_in_band_;
};

class Ol : public Strategy {
 public:
  explicit Ol(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::ol; }
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;

  struct Guide {
    std::vector<std::uint8_t> levels;
    std::size_t source = 0;  // particle supplying the level-1 factor
    bool built = false;
  };
  const Guide& guide(std::size_t i) const { return guides_.at(i); }
  std::size_t rebuilds(std::size_t i) const { return rebuilds_.at(i); }

 private:
  StrategySpec spec_;
  std::vector<Guide> guides_;
  std::vector<std::size_t> rebuilds_;
};

/// Shared machinery of the two ensembles: a fixed elite group on one member
/// and an adaptive group choosing among members per generation.
class Ensemble : public Strategy {
 public:
  void initialize(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  std::vector<Proposal> step(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  Proposal propose(SwarmState& state, std::size_t i, StepContext& ctx, RngStream& rng) override;
  void observe(SwarmState& state, std::span<const Outcome> outcomes, StepContext& ctx) override;

  std::size_t elite_size() const { return elite_; }
  /// Member index used by particle i in the current generation.
  std::size_t assignment(std::size_t i) const { return assignment_.at(i); }
  std::size_t member_count() const { return members_.size(); }
  /// Current selection probabilities over members.
  virtual std::vector<double> probabilities() const = 0;

 protected:
  Ensemble(std::vector<StrategyKind> members, std::size_t elite_member);

  virtual std::size_t elite_count(std::size_t n) const = 0;
  /// Chooses members for the adaptive group; called once per generation.
  virtual void assign(SwarmState& state, StepContext& ctx, RngStream& rng) = 0;
  virtual void record(std::size_t member, bool success) = 0;

  std::vector<std::unique_ptr<Strategy>> members_;
  std::size_t elite_member_;
  std::size_t elite_ = 0;
  std::vector<std::size_t> assignment_;
};

class Epso : public Ensemble {
 public:
  explicit Epso(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::epso; }
  std::vector<double> probabilities() const override;
  const SuccessLedger& ledger() const { return ledger_; }

 private:
  std::size_t elite_count(std::size_t n) const override;
  void assign(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  void record(std::size_t member, bool success) override;

  StrategySpec spec_;
  SuccessLedger ledger_;
};

class Sdl : public Ensemble {
 public:
  explicit Sdl(StrategySpec spec);
  StrategyKind kind() const override { return StrategyKind::sdl; }
  std::vector<double> probabilities() const override;
  std::size_t stage() const { return stage_; }

 private:
  std::size_t elite_count(std::size_t n) const override;
  void assign(SwarmState& state, StepContext& ctx, RngStream& rng) override;
  void record(std::size_t member, bool success) override;

  StrategySpec spec_;
  SuccessLedger ledger_;
  std::size_t stage_ = 0;
};

}  // namespace pso
