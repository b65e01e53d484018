#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "survplan/buchi.hpp"
#include "survplan/ltl.hpp"
#include "survplan/product.hpp"
#include "survplan/rewards.hpp"
#include "survplan/rng.hpp"
#include "survplan/ts.hpp"

namespace survplan {

inline constexpr std::string_view kInfeasibleMessage = "Mission cannot be accomplished";

/// Everything computed before deployment. Immutable; planners share it.
struct OfflinePlan {
  TransitionSystem ts;
  PropId surveillance = 0;
  ltl::Formula mission;
  BuchiAutomaton automaton;
  DistanceMatrix ts_distances;
  VisibilityMap visibility;
  std::vector<double> ts_to_survey;  // min W* from each TS state to a surveyed state
  PreparedProduct prepared;
  std::vector<StateId> projection;   // trimmed product state -> TS state
  bool label_condition = false;      // accepting in-edges all carry the surveillance prop
  double offline_seconds = 0.0;

  bool feasible() const { return prepared.feasible(); }
  const ProductAutomaton& product() const { return prepared.product; }
};

/// Builds the automaton, the product and runs the offline phase.
/// `mission` must already contain the `G F surveillance` conjunct.
OfflinePlan prepare_offline(TransitionSystem ts, const ltl::Formula& mission, PropId surveillance,
                            double visibility);

/// TS-level shortening indicator: moving q -> q2 strictly decreases the
/// minimum weight to a surveyed state.
bool ts_shortening(std::span<const double> ts_to_survey, StateId q, StateId q2);

enum class Subgoal { Surveillance, Mission };
std::string_view to_string(Subgoal s);

/// Surveillance flags of a product prefix after the mission-mode projection:
/// position 0 keeps its label; a later surveyed position i keeps it only if
/// some earlier position j visited the accepting infinity set and no
/// position in [j, i) was surveyed.
std::vector<char> alpha_bar_surveys(std::span<const char> surveyed,
                                    std::span<const char> accepting_inf);

struct PlannerConfig {
  double horizon = 9.0;
  std::shared_ptr<const PotentialFunction> potential;
  std::shared_ptr<const PreferenceFunction> preference;
  double tie_tolerance = 1e-9;
};

struct Candidate {
  ProductId node;
  StateId ts;
  double weight;
  double potential;
  bool shortening;  // indicator of the current subgoal
  double attraction;
};

struct StepRecord {
  std::size_t step = 0;  // index of the new position in the prefix
  ProductId from = 0, to = 0;
  StateId ts_from = 0, ts_to = 0;
  BaState ba_to = 0;
  double weight = 0.0;
  double time = 0.0;  // arrival time
  Subgoal subgoal_before = Subgoal::Surveillance;
  Subgoal subgoal_after = Subgoal::Surveillance;
  double attraction = 0.0;
  double preference = 0.0;   // value added to shortening candidates
  double elapsed = 0.0;      // weight since survey that the preference saw
  double elapsed_raw = 0.0;  // same, on the unmasked prefix
  double cost = 0.0;         // TS cost of the chosen state
  double best_cost = 0.0;    // best TS cost over all TS successors
  bool survey = false;       // entered a surveyed TS state
  bool accepting_inf = false;
  bool surveillance_inf = false;
  std::size_t tied = 1;
  std::vector<Candidate> candidates;
};

/// Online receding-horizon controller. One instance per simulated robot.
class Planner {
 public:
  /// Throws ContractError if the plan is infeasible.
  Planner(std::shared_ptr<const OfflinePlan> plan, PlannerConfig config, std::uint64_t seed);

  /// Scores every successor of the current product state, moves to one with
  /// the highest attraction (uniformly among ties) and updates the subgoal.
  StepRecord step(const RewardField& field);

  /// Attraction of every successor of the current state.
  std::vector<Candidate> candidates(const RewardField& field) const;

  /// pot + I * pref on the TS, for a TS successor q of the current TS state.
  double evaluate_cost(StateId q, const RewardField& field) const;

  /// Largest potential over TS successors of the current TS state.
  double max_successor_potential(const RewardField& field) const;

  ProductId current() const { return prefix_.back(); }
  StateId current_ts() const { return plan_->projection[prefix_.back()]; }
  Subgoal subgoal() const { return subgoal_; }
  std::span<const ProductId> prefix() const { return prefix_; }
  std::span<const double> times() const { return times_; }
  const OfflinePlan& plan() const { return *plan_; }
  const PlannerConfig& config() const { return config_; }

  /// Weight since the last survey on the raw and on the masked prefix.
  double elapsed_raw() const { return times_.back() - last_survey_; }
  double elapsed_masked() const { return times_.back() - last_unmasked_survey_; }

 private:
  LocalContext ts_context(const RewardField& field) const;
  LocalContext product_context(const RewardField& field) const;
  void record_position(ProductId p, double time);

  std::shared_ptr<const OfflinePlan> plan_;
  PlannerConfig config_;
  Rng rng_;

  std::vector<ProductId> prefix_;
  std::vector<double> times_;
  Subgoal subgoal_ = Subgoal::Surveillance;
  double last_survey_ = 0.0;
  double last_unmasked_survey_ = 0.0;
  bool seen_accepting_ = false;
  bool window_clean_ = false;
};

}  // namespace survplan
