#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "survplan/graph.hpp"
#include "survplan/types.hpp"

namespace survplan {

/// Names of atomic propositions, indexed densely from 0.
class PropositionTable {
 public:
  PropositionTable() = default;
  PropositionTable(std::initializer_list<std::string> names);

  /// Returns the id of `name`, adding it if new.
  PropId add(std::string_view name);
  std::optional<PropId> find(std::string_view name) const;
  /// Like find(), but throws ValidationError for unknown names.
  PropId at(std::string_view name) const;

  const std::string& name(PropId p) const { return names_.at(p); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  std::string format(LabelSet set) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, PropId> index_;
};

/// Weighted deterministic transition system: states, one initial state,
/// positively weighted transitions and a labeling with atomic propositions.
///
/// Instances are immutable once built; use TransitionSystemBuilder.
class TransitionSystem {
 public:
  /// An empty system with no states; only useful as a placeholder.
  TransitionSystem() = default;

  std::size_t size() const { return names_.size(); }
  StateId initial() const { return initial_; }

  const PropositionTable& propositions() const { return props_; }
  LabelSet label(StateId q) const { return labels_.at(q); }
  bool has(StateId q, PropId p) const { return has_prop(labels_.at(q), p); }

  const std::string& name(StateId q) const { return names_.at(q); }
  std::optional<StateId> find(std::string_view name) const;

  std::span<const Arc> successors(StateId q) const { return graph_.successors(q); }
  const WeightedDigraph& graph() const { return graph_; }

  /// Weight of (from, to), or nullopt when it is not a transition.
  std::optional<double> weight(StateId from, StateId to) const;
  bool is_transition(StateId from, StateId to) const { return weight(from, to).has_value(); }

  std::size_t transition_count() const { return graph_.arc_count(); }
  double max_weight() const { return max_weight_; }
  double min_weight() const { return min_weight_; }

  /// States whose label contains `p`.
  std::vector<StateId> states_with(PropId p) const;

 private:
  friend class TransitionSystemBuilder;

  std::vector<std::string> names_;
  std::unordered_map<std::string, StateId> index_;
  std::vector<LabelSet> labels_;
  PropositionTable props_;
  WeightedDigraph graph_;
  StateId initial_ = 0;
  double max_weight_ = 0.0;
  double min_weight_ = 0.0;
};

class TransitionSystemBuilder {
 public:
  PropId add_proposition(std::string_view name) { return props_.add(name); }

  /// Adds a state; labels must name propositions declared beforehand.
  StateId add_state(std::string name, std::span<const std::string> labels = {});
  StateId add_state(std::string name, std::initializer_list<std::string> labels);
  void add_label(StateId q, std::string_view prop);

  void add_transition(StateId from, StateId to, double weight);
  void add_transition(std::string_view from, std::string_view to, double weight);

  void set_initial(StateId q) { initial_ = q; }
  void set_initial(std::string_view name);

  std::optional<StateId> find(std::string_view name) const;
  std::size_t size() const { return names_.size(); }

  /// Validates and freezes the system. Throws ValidationError when the
  /// initial state is missing, a weight is not strictly positive, a
  /// transition is declared twice, or some state has no outgoing transition.
  TransitionSystem build() const;

 private:
  StateId require(std::string_view name) const;

  PropositionTable props_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, StateId> index_;
  std::vector<LabelSet> labels_;
  struct PendingTransition {
    StateId from, to;
    double weight;
  };
  std::vector<PendingTransition> transitions_;
  std::optional<StateId> initial_;
};

/// A finite run q_i ... q_j; consecutive states must be transitions.
struct FiniteRun {
  std::vector<StateId> states;

  friend bool operator==(const FiniteRun&, const FiniteRun&) = default;
  friend auto operator<=>(const FiniteRun&, const FiniteRun&) = default;
};

/// Total weight of the run's transitions; 0 for a single state.
/// Throws ValidationError if some consecutive pair is not a transition.
double run_weight(const TransitionSystem& ts, std::span<const StateId> run);

/// Arrival times t_0 = 0, t_{i+1} = t_i + W(q_i, q_{i+1}).
std::vector<double> run_times(const TransitionSystem& ts, std::span<const StateId> run);

/// Minimum run weight between every pair of states (Floyd-Warshall).
DistanceMatrix all_pairs_min_weight(const TransitionSystem& ts);

/// V(q) = { q' | W*(q, q') <= v }, in increasing state order.
std::vector<StateId> visibility_set(const DistanceMatrix& dist, StateId q, double v);

/// Visibility sets of every state as membership masks.
///
/// Construction checks that each direct successor of a state is visible from
/// it and throws ValidationError otherwise.
class VisibilityMap {
 public:
  VisibilityMap() = default;
  VisibilityMap(const TransitionSystem& ts, const DistanceMatrix& dist, double range);

  double range() const { return range_; }
  std::span<const char> visible_from(StateId q) const { return {mask_.data() + q * n_, n_}; }
  bool visible(StateId from, StateId q) const { return mask_[from * n_ + q] != 0; }

 private:
  std::size_t n_ = 0;
  double range_ = 0.0;
  std::vector<char> mask_;
};

/// Every finite run rho with
///   (i)   rho(0) == q,
///   (ii)  W(rho) + W((q_k, q)) <= h, and
///   (iii) every state of rho is visible from q_k.
/// States may repeat. Requires (q_k, q) to be a transition and
/// h >= the largest transition weight; throws ContractError otherwise.
std::vector<FiniteRun> local_runs(const TransitionSystem& ts, const VisibilityMap& visibility,
                                  StateId q, StateId q_k, double h);

}  // namespace survplan
