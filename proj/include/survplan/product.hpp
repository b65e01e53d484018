#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survplan/buchi.hpp"
#include "survplan/graph.hpp"
#include "survplan/ts.hpp"

namespace survplan {

using ProductId = std::uint32_t;

struct ProductState {
  StateId ts;
  BaState ba;

  friend bool operator==(const ProductState&, const ProductState&) = default;
};

/// Weighted product of a transition system and a Büchi automaton, restricted
/// to states reachable from (q0, s0). ((q,s),(q',s')) is a transition iff
/// (q,q') is a TS transition and (s, L(q), s') an automaton transition; it
/// inherits the TS weight.
class ProductAutomaton {
 public:
  std::size_t size() const { return states_.size(); }
  ProductId initial() const { return 0; }
  const ProductState& state(ProductId p) const { return states_.at(p); }
  std::span<const ProductState> states() const { return states_; }

  std::span<const Arc> successors(ProductId p) const { return graph_.successors(p); }
  const WeightedDigraph& graph() const { return graph_; }

  bool accepting(ProductId p) const { return accepting_.at(p) != 0; }
  bool surveillance(ProductId p) const { return surveillance_.at(p) != 0; }
  std::span<const char> accepting_mask() const { return accepting_; }
  std::span<const char> surveillance_mask() const { return surveillance_; }

  std::optional<ProductId> find(ProductState s) const;

  /// Keeps the states in `keep` that stay reachable from the initial state.
  /// `old_to_new` receives the renumbering (UINT32_MAX for dropped states).
  /// Returns an empty product when the initial state is dropped.
  ProductAutomaton restrict_to(std::span<const char> keep,
                               std::vector<ProductId>* old_to_new = nullptr) const;

 private:
  friend ProductAutomaton build_product(const TransitionSystem&, const BuchiAutomaton&, PropId);
  friend ProductAutomaton make_product(std::vector<ProductState>, WeightedDigraph,
                                       std::vector<char>, std::vector<char>);

  std::vector<ProductState> states_;
  WeightedDigraph graph_;
  std::vector<char> accepting_;
  std::vector<char> surveillance_;
};

ProductAutomaton build_product(const TransitionSystem& ts, const BuchiAutomaton& ba,
                               PropId surveillance);

/// Assembles a product from raw parts (state 0 is initial). For tests and
/// tools that need products not derived from a TS.
ProductAutomaton make_product(std::vector<ProductState> states, WeightedDigraph graph,
                              std::vector<char> accepting, std::vector<char> surveillance);

/// Accepting states and surveillance states that can be visited infinitely
/// often, as membership masks.
struct InfinitySets {
  std::vector<char> accepting;     // F-infinity
  std::vector<char> surveillance;  // S-pi-infinity

  bool empty() const;
};

/// Mutual-pruning fixpoint: starting from all accepting and all surveillance
/// states, drop an accepting state when no successor reaches a remaining
/// surveillance state, and symmetrically, until nothing changes.
InfinitySets compute_inf_sets(const ProductAutomaton& p, const DistanceMatrix& dist);

/// (u, v) distance pair for the mission subgoal. Strict order only when both
/// components are strictly smaller; otherwise the pairs are unordered.
struct DistancePair {
  double u = kInfinity;
  double v = kInfinity;

  bool infinite() const { return u == kInfinity && v == kInfinity; }
  friend bool operator==(const DistancePair&, const DistancePair&) = default;
};

inline bool strictly_less(const DistancePair& a, const DistancePair& b) {
  return a.u < b.u && a.v < b.v;
}

/// Minimum weight from each state to the surveillance infinity set.
std::vector<double> surveillance_distances(const DistanceMatrix& dist, const InfinitySets& inf);

/// For each state p: v is the least weight of a run from p to the
/// surveillance infinity set through some accepting-infinity state p', and u
/// the least W*(p, p') among the p' attaining v.
std::vector<DistancePair> mission_distances(const DistanceMatrix& dist, const InfinitySets& inf,
                                            std::span<const double> to_surveillance);

/// Drops every state with an infinite surveillance distance or an infinite
/// mission pair (such states lie on no accepting run), then everything no
/// longer reachable from the initial state.
ProductAutomaton trim(const ProductAutomaton& p, std::span<const double> to_surveillance,
                      std::span<const DistancePair> to_mission,
                      std::vector<ProductId>* old_to_new = nullptr);

/// Shortening indicators, one per product transition in successor order:
/// 1 iff the transition strictly decreases the respective distance.
struct Indicators {
  std::vector<std::vector<char>> surveillance;
  std::vector<std::vector<char>> mission;
};

Indicators compute_indicators(const ProductAutomaton& p, std::span<const double> to_surveillance,
                              std::span<const DistancePair> to_mission);

/// Checks that every state outside each infinity set has a transition with
/// the corresponding indicator set. Returns a description of the first
/// violation, or nullopt.
std::optional<std::string> find_indicator_gap(const ProductAutomaton& p, const InfinitySets& inf,
                                              const Indicators& ind);

/// True iff every automaton transition into an accepting state carries a
/// letter containing `surveillance`.
bool check_accepting_label_condition(const BuchiAutomaton& ba, PropId surveillance);

/// Output of the offline phase on a product.
struct PreparedProduct {
  ProductAutomaton product;  // trimmed; empty when infeasible
  DistanceMatrix distances;
  InfinitySets inf;
  std::vector<double> to_surveillance;
  std::vector<DistancePair> to_mission;
  Indicators indicators;
  std::size_t untrimmed_size = 0;

  bool feasible() const;
};

/// Runs the full offline phase: all-pairs weights, the infinity-set
/// fixpoint, both distance functionals, trimming of states that cannot lie on
/// an accepting run, and the indicators. Throws InternalError if the trimmed
/// product violates the indicator guarantee.
PreparedProduct prepare_product(const ProductAutomaton& product);

/// Tab-separated listing of a prepared product for inspection.
std::string dump(const PreparedProduct& prepared, const TransitionSystem& ts);

}  // namespace survplan
