#include "survplan/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "survplan/error.hpp"
#include "survplan/local_runs.hpp"

namespace survplan {

void RewardField::set(StateId q, double value) {
  if (!(value >= 0.0)) throw ValidationError("rewards must be non-negative");
  values_.at(q) = value;
}

double RewardField::take(StateId q) {
  const double v = values_.at(q);
  values_[q] = 0.0;
  return v;
}

CaseStudyDynamics::CaseStudyDynamics(CaseStudyParams params) : params_(params), rng_(params.seed) {
  if (!(params.spawn_probability >= 0.0 && params.spawn_probability <= 1.0))
    throw ValidationError("spawn probability must lie in [0, 1]");
  if (params.large_max <= params.small_max)
    throw ValidationError("large reward range must lie above the small range");
}

double CaseStudyDynamics::draw_fresh() {
  if (rng_.bernoulli(params_.small_share))
    return static_cast<double>(rng_.uniform_int(0, params_.small_max));
  return static_cast<double>(rng_.uniform_int(params_.small_max + 1, params_.large_max));
}

void CaseStudyDynamics::tick(RewardField& field) {
  for (StateId q = 0; q < field.size(); ++q) {
    const double v = field.value(q);
    if (v > 0.0) field.set(q, std::max(0.0, v - params_.decay_per_unit));
  }
  for (StateId q = 0; q < field.size(); ++q)
    if (field.value(q) == 0.0 && rng_.bernoulli(params_.spawn_probability))
      field.set(q, draw_fresh());
}

void CaseStudyDynamics::evolve(RewardField& field, double dt) {
  if (dt < 0.0) throw ContractError("cannot evolve rewards backwards in time");
  const double start = field.clock();
  const auto ticks = static_cast<long long>(std::floor(start + dt) - std::floor(start));
  for (long long i = 0; i < ticks; ++i) tick(field);
  field.advance_clock(dt);
}

std::unique_ptr<CaseStudyDynamics> case_study_dynamics(CaseStudyParams params) {
  return std::make_unique<CaseStudyDynamics>(params);
}

double PackagePotential::worth(const LocalContext& ctx, std::span<const std::uint32_t> run,
                               std::span<const double> offsets, std::size_t i) const {
  const StateId q = ctx.ts_state(run[i]);
  if (q == ctx.current) return fallback_;
  for (std::size_t j = 0; j < i; ++j)
    if (ctx.ts_state(run[j]) == q) return fallback_;
  const double value = ctx.rewards[q] - offsets[i];
  return value > 0.0 ? value : fallback_;
}

namespace {

template <class Visit>
void enumerate(const LocalContext& ctx, std::uint32_t candidate, double entry_weight, Visit&& visit) {
  if (ctx.graph == nullptr) throw ContractError("potential evaluated without a graph");
  if (ctx.horizon < entry_weight)
    throw ContractError("horizon is shorter than the transition to the candidate");
  const auto visible = [&](std::uint32_t node) { return ctx.visible[ctx.ts_state(node)] != 0; };
  for_each_local_run(*ctx.graph, candidate, ctx.horizon - entry_weight, visible, visit);
}

}  // namespace

double SumPotential::evaluate(const LocalContext& ctx, std::uint32_t candidate,
                              double entry_weight) const {
  double best = 0.0;
  std::vector<double> partial;
  enumerate(ctx, candidate, entry_weight,
            [&](std::span<const std::uint32_t> run, std::span<const double> offsets) {
              // depth-first order: the run minus its last state was visited just before
              partial.resize(run.size());
              const double before = run.size() > 1 ? partial[run.size() - 2] : 0.0;
              partial.back() = before + worth(ctx, run, offsets, run.size() - 1);
              best = std::max(best, partial.back());
            });
  return best;
}

double MaxPackagePotential::evaluate(const LocalContext& ctx, std::uint32_t candidate,
                                     double entry_weight) const {
  double best = 0.0;
  enumerate(ctx, candidate, entry_weight,
            [&](std::span<const std::uint32_t> run, std::span<const double> offsets) {
              best = std::max(best, worth(ctx, run, offsets, run.size() - 1));
            });
  return best;
}

double StepPreference::evaluate(double elapsed, double max_potential) const {
  return elapsed <= threshold_ ? 0.0 : max_potential + 1.0;
}

double CubicPreference::evaluate(double elapsed, double max_potential) const {
  return elapsed * elapsed * elapsed / (threshold_ * threshold_ * threshold_) * max_potential;
}

double CubeRootPreference::evaluate(double elapsed, double max_potential) const {
  return std::cbrt(elapsed) / std::cbrt(threshold_) * max_potential;
}

double elapsed_since_survey(std::span<const double> times, std::span<const char> surveyed) {
  if (times.empty()) throw ContractError("elapsed_since_survey: empty prefix");
  std::size_t last = 0;
  for (std::size_t i = times.size(); i-- > 0;) {
    if (surveyed[i]) {
      last = i;
      break;
    }
  }
  return times.back() - times[last];
}

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, PotentialFactory, std::less<>> potentials;
  std::map<std::string, PreferenceFactory, std::less<>> preferences;

  Registry() {
    potentials["pot1"] = [](const PolicyParams& p) {
      return std::make_shared<const SumPotential>(p.revisit_value);
    };
    potentials["pot2"] = [](const PolicyParams&) {
      return std::make_shared<const MaxPackagePotential>(0.0);
    };
    preferences["pref1"] = [](const PolicyParams& p) {
      return std::make_shared<const StepPreference>(p.pref_threshold);
    };
    preferences["pref2"] = [](const PolicyParams& p) {
      return std::make_shared<const CubicPreference>(p.pref_threshold);
    };
    preferences["pref3"] = [](const PolicyParams& p) {
      return std::make_shared<const CubeRootPreference>(p.pref_threshold);
    };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_potential(std::string name, PotentialFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.potentials[std::move(name)] = std::move(factory);
}

void register_preference(std::string name, PreferenceFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.preferences[std::move(name)] = std::move(factory);
}

std::shared_ptr<const PotentialFunction> make_potential(std::string_view name,
                                                        const PolicyParams& params) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.potentials.find(name);
  if (it == r.potentials.end())
    throw ValidationError("unknown potential function '" + std::string(name) + "'");
  return it->second(params);
}

std::shared_ptr<const PreferenceFunction> make_preference(std::string_view name,
                                                          const PolicyParams& params) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.preferences.find(name);
  if (it == r.preferences.end())
    throw ValidationError("unknown preference function '" + std::string(name) + "'");
  return it->second(params);
}

}  // namespace survplan
