#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "survplan/graph.hpp"
#include "survplan/rng.hpp"
#include "survplan/types.hpp"

namespace survplan {

/// Non-negative reward per TS state plus the time it was last advanced to.
class RewardField {
 public:
  RewardField() = default;
  explicit RewardField(std::size_t states) : values_(states, 0.0) {}

  std::size_t size() const { return values_.size(); }
  double value(StateId q) const { return values_.at(q); }
  std::span<const double> values() const { return values_; }
  double clock() const { return clock_; }

  void set(StateId q, double value);
  /// Returns the reward at q and resets it to 0.
  double take(StateId q);
  void advance_clock(double dt) { clock_ += dt; }

 private:
  std::vector<double> values_;
  double clock_ = 0.0;
};

/// How rewards change over time and on collection.
class RewardDynamics {
 public:
  virtual ~RewardDynamics() = default;

  /// Advances the field (and its clock) by dt >= 0 time units.
  virtual void evolve(RewardField& field, double dt) = 0;

  /// The robot arrives at q; returns the collected amount.
  virtual double on_collect(RewardField& field, StateId q) { return field.take(q); }
};

struct CaseStudyParams {
  double spawn_probability = 0.05;  // per zero-valued state and time unit
  std::uint64_t seed = 0;
  std::uint32_t small_max = 15;     // small packages: {0..small_max}
  std::uint32_t large_max = 60;     // large packages: {small_max+1..large_max}
  double small_share = 0.5;
  double decay_per_unit = 1.0;
};

/// Data-package dynamics: at every whole time unit each positive reward
/// drops by one (not below 0), then every zero-valued state spawns a fresh
/// reward with the configured probability. Fresh rewards are small or large
/// with equal probability and uniform within their range.
class CaseStudyDynamics final : public RewardDynamics {
 public:
  explicit CaseStudyDynamics(CaseStudyParams params);

  void evolve(RewardField& field, double dt) override;

  /// Draws the size of one fresh reward.
  double draw_fresh();
  const CaseStudyParams& params() const { return params_; }

 private:
  void tick(RewardField& field);

  CaseStudyParams params_;
  Rng rng_;
};

std::unique_ptr<CaseStudyDynamics> case_study_dynamics(CaseStudyParams params);

/// What a potential function may look at: local runs are enumerated on
/// `graph` (the TS itself, or a product whose nodes project to TS states).
struct LocalContext {
  const WeightedDigraph* graph = nullptr;
  std::span<const StateId> projection;  // node -> TS state; empty = identity
  StateId current = 0;                  // q_k
  std::span<const char> visible;        // visibility from q_k, per TS state
  std::span<const double> rewards;      // sensed rewards, per TS state
  double horizon = 0.0;

  StateId ts_state(std::uint32_t node) const {
    return projection.empty() ? node : projection[node];
  }
};

/// Estimated reward of moving to a candidate successor of q_k.
class PotentialFunction {
 public:
  virtual ~PotentialFunction() = default;
  virtual std::string name() const = 0;
  /// `candidate` is a node of ctx.graph entered from q_k over an edge of
  /// weight `entry_weight`.
  virtual double evaluate(const LocalContext& ctx, std::uint32_t candidate,
                          double entry_weight) const = 0;
};

/// Shared machinery of the two data-package potentials: a state on a local
/// run is worth R(state) - W(run up to it) when that is positive, the state
/// is not q_k and it was not visited earlier on the run; otherwise it is
/// worth `fallback`.
class PackagePotential : public PotentialFunction {
 public:
  explicit PackagePotential(double fallback) : fallback_(fallback) {}
  double fallback() const { return fallback_; }

 protected:
  double worth(const LocalContext& ctx, std::span<const std::uint32_t> run,
               std::span<const double> offsets, std::size_t i) const;

 private:
  double fallback_;
};

/// pot1: largest total worth of a local run; fallback 15 by default.
class SumPotential final : public PackagePotential {
 public:
  explicit SumPotential(double fallback = 15.0) : PackagePotential(fallback) {}
  std::string name() const override { return "pot1"; }
  double evaluate(const LocalContext& ctx, std::uint32_t candidate,
                  double entry_weight) const override;
};

/// pot2: largest single worth on any local run; fallback 0 by default.
class MaxPackagePotential final : public PackagePotential {
 public:
  explicit MaxPackagePotential(double fallback = 0.0) : PackagePotential(fallback) {}
  std::string name() const override { return "pot2"; }
  double evaluate(const LocalContext& ctx, std::uint32_t candidate,
                  double entry_weight) const override;
};

/// Importance of surveillance progress as a function of the weight elapsed
/// since the last survey and the best successor potential.
class PreferenceFunction {
 public:
  virtual ~PreferenceFunction() = default;
  virtual std::string name() const = 0;
  virtual double evaluate(double elapsed, double max_potential) const = 0;
};

/// pref1: 0 while elapsed <= threshold, then max_potential + 1.
class StepPreference final : public PreferenceFunction {
 public:
  explicit StepPreference(double threshold = 50.0) : threshold_(threshold) {}
  std::string name() const override { return "pref1"; }
  double evaluate(double elapsed, double max_potential) const override;

 private:
  double threshold_;
};

/// pref2: (elapsed / threshold)^3 * max_potential.
class CubicPreference final : public PreferenceFunction {
 public:
  explicit CubicPreference(double threshold = 50.0) : threshold_(threshold) {}
  std::string name() const override { return "pref2"; }
  double evaluate(double elapsed, double max_potential) const override;

 private:
  double threshold_;
};

/// pref3: cbrt(elapsed / threshold) * max_potential.
class CubeRootPreference final : public PreferenceFunction {
 public:
  explicit CubeRootPreference(double threshold = 50.0) : threshold_(threshold) {}
  std::string name() const override { return "pref3"; }
  double evaluate(double elapsed, double max_potential) const override;

 private:
  double threshold_;
};

/// Weight elapsed since the last surveyed position of a prefix, measured
/// from the start when no position is surveyed.
double elapsed_since_survey(std::span<const double> times, std::span<const char> surveyed);

struct PolicyParams {
  double revisit_value = 15.0;   // pot1 fallback
  double pref_threshold = 50.0;
};

using PotentialFactory = std::function<std::shared_ptr<const PotentialFunction>(const PolicyParams&)>;
using PreferenceFactory = std::function<std::shared_ptr<const PreferenceFunction>(const PolicyParams&)>;

/// Name-based lookup of potential and preference functions. pot1, pot2,
/// pref1, pref2 and pref3 are registered up front.
void register_potential(std::string name, PotentialFactory factory);
void register_preference(std::string name, PreferenceFactory factory);
std::shared_ptr<const PotentialFunction> make_potential(std::string_view name,
                                                        const PolicyParams& params = {});
std::shared_ptr<const PreferenceFunction> make_preference(std::string_view name,
                                                          const PolicyParams& params = {});

}  // namespace survplan
