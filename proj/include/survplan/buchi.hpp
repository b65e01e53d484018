#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survplan/ltl.hpp"
#include "survplan/types.hpp"

namespace survplan {

using BaState = std::uint32_t;

/// Büchi automaton over the alphabet 2^Props. Every transition carries one
/// concrete proposition set; a word is accepted when some run over it visits
/// an accepting state infinitely often.
class BuchiAutomaton {
 public:
  struct Edge {
    LabelSet letter;
    BaState target;

    friend auto operator<=>(const Edge&, const Edge&) = default;
  };

  explicit BuchiAutomaton(std::size_t num_propositions = 0);

  BaState add_state(bool accepting = false);
  /// Duplicate transitions are ignored.
  void add_transition(BaState from, LabelSet letter, BaState to);
  void set_initial(BaState s) { initial_ = s; }
  void set_accepting(BaState s, bool accepting) { accepting_.at(s) = accepting; }

  std::size_t size() const { return edges_.size(); }
  std::size_t num_propositions() const { return num_props_; }
  std::size_t alphabet_size() const { return std::size_t{1} << num_props_; }
  BaState initial() const { return initial_; }
  bool accepting(BaState s) const { return accepting_.at(s) != 0; }
  std::size_t accepting_count() const;
  std::size_t transition_count() const;

  /// Outgoing transitions sorted by (letter, target).
  std::span<const Edge> edges(BaState s) const { return edges_.at(s); }
  /// Targets of transitions (s, letter, *).
  std::span<const Edge> successors(BaState s, LabelSet letter) const;

 private:
  std::size_t num_props_;
  BaState initial_ = 0;
  std::vector<char> accepting_;
  std::vector<std::vector<Edge>> edges_;
};

/// Translates a formula into an automaton accepting exactly its models.
///
/// Tableau expansion of negation-normal-form obligations produces a
/// generalized Büchi automaton with one acceptance condition per until
/// sub-formula (satisfied by every transition that does not postpone it);
/// level counters then reduce it to a single accepting set. Unreachable
/// states are never created. Acceptance conditions are ordered by the
/// position of their until in the formula, so for `phi & G F p` the last
/// condition completed before an accepting state is the one for `F p`.
///
/// The result is pruned with prune_by_simulation().
BuchiAutomaton to_buchi(const ltl::Formula& formula, std::size_t num_propositions);

/// Drops every transition (s, l, y) for which s also has a transition
/// (s, l, z) to a state z that directly simulates y (z matches each move of
/// y letter by letter and is accepting whenever y is). When y and z simulate
/// each other the lower-numbered target is kept. States left unreachable are
/// removed. The language is unchanged, and a run can no longer pass up an
/// accepting branch in favour of a weaker sibling.
BuchiAutomaton prune_by_simulation(const BuchiAutomaton& ba);

/// Witness of an accepting run over stem . loop^omega. Step i is in
/// automaton state `states[i]` and reads lasso letter `positions[i]`; after
/// the last step the run continues at step `cycle_start`, so the steps from
/// there on repeat forever.
struct LassoRun {
  std::vector<BaState> states;
  std::vector<std::size_t> positions;
  std::size_t cycle_start = 0;
};

/// Searches the product of the automaton with the lasso's position graph for
/// a reachable cycle through an accepting state.
std::optional<LassoRun> accepting_lasso_run(const BuchiAutomaton& ba,
                                            std::span<const LabelSet> stem,
                                            std::span<const LabelSet> loop);

bool lasso_accepts(const BuchiAutomaton& ba, std::span<const LabelSet> stem,
                   std::span<const LabelSet> loop);

/// Plain-text adjacency listing, one transition per line.
std::string to_text(const BuchiAutomaton& ba, const PropositionTable& props);

}  // namespace survplan
