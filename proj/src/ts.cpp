#include "survplan/ts.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "survplan/error.hpp"
#include "survplan/local_runs.hpp"

namespace survplan {

PropositionTable::PropositionTable(std::initializer_list<std::string> names) {
  for (const auto& n : names) add(n);
}

PropId PropositionTable::add(std::string_view name) {
  if (auto found = find(name)) return *found;
  if (names_.size() >= kMaxPropositions)
    throw ValidationError("too many atomic propositions (limit " +
                          std::to_string(kMaxPropositions) + ")");
  const auto id = static_cast<PropId>(names_.size());
  names_.emplace_back(name);
  index_.emplace(std::string(name), id);
  return id;
}

std::optional<PropId> PropositionTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PropId PropositionTable::at(std::string_view name) const {
  if (auto p = find(name)) return *p;
  throw ValidationError("undeclared proposition '" + std::string(name) + "'");
}

std::string PropositionTable::format(LabelSet set) const {
  std::string out = "{";
  bool first = true;
  for (PropId p = 0; p < names_.size(); ++p) {
    if (!has_prop(set, p)) continue;
    if (!first) out += ",";
    out += names_[p];
    first = false;
  }
  return out + "}";
}

std::optional<StateId> TransitionSystem::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> TransitionSystem::weight(StateId from, StateId to) const {
  if (from >= size()) return std::nullopt;
  for (const Arc& a : graph_.successors(from))
    if (a.to == to) return a.weight;
  return std::nullopt;
}

std::vector<StateId> TransitionSystem::states_with(PropId p) const {
  std::vector<StateId> out;
  for (StateId q = 0; q < size(); ++q)
    if (has(q, p)) out.push_back(q);
  return out;
}

StateId TransitionSystemBuilder::add_state(std::string name, std::span<const std::string> labels) {
  if (index_.contains(name)) throw ValidationError("duplicate state '" + name + "'");
  const auto id = static_cast<StateId>(names_.size());
  index_.emplace(name, id);
  names_.push_back(std::move(name));
  labels_.push_back(0);
  for (const auto& l : labels) add_label(id, l);
  return id;
}

StateId TransitionSystemBuilder::add_state(std::string name,
                                           std::initializer_list<std::string> labels) {
  return add_state(std::move(name), std::span<const std::string>(labels.begin(), labels.size()));
}

void TransitionSystemBuilder::add_label(StateId q, std::string_view prop) {
  if (q >= names_.size()) throw ValidationError("label on unknown state");
  labels_[q] |= prop_bit(props_.at(prop));
}

void TransitionSystemBuilder::add_transition(StateId from, StateId to, double weight) {
  if (from >= names_.size() || to >= names_.size())
    throw ValidationError("transition endpoint is not a state");
  if (!(weight > 0.0) || weight == kInfinity)
    throw ValidationError("transition " + names_[from] + " -> " + names_[to] +
                          " must have a finite positive weight");
  transitions_.push_back({from, to, weight});
}

void TransitionSystemBuilder::add_transition(std::string_view from, std::string_view to,
                                             double weight) {
  add_transition(require(from), require(to), weight);
}

void TransitionSystemBuilder::set_initial(std::string_view name) { initial_ = require(name); }

std::optional<StateId> TransitionSystemBuilder::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

StateId TransitionSystemBuilder::require(std::string_view name) const {
  if (auto q = find(name)) return *q;
  throw ValidationError("unknown state '" + std::string(name) + "'");
}

TransitionSystem TransitionSystemBuilder::build() const {
  if (names_.empty()) throw ValidationError("transition system has no states");
  if (!initial_) throw ValidationError("transition system has no initial state");

  TransitionSystem ts;
  ts.names_ = names_;
  ts.index_ = index_;
  ts.labels_ = labels_;
  ts.props_ = props_;
  ts.initial_ = *initial_;
  ts.graph_ = WeightedDigraph(names_.size());

  std::set<std::pair<StateId, StateId>> seen;
  ts.min_weight_ = kInfinity;
  for (const auto& t : transitions_) {
    if (!seen.emplace(t.from, t.to).second)
      throw ValidationError("transition " + names_[t.from] + " -> " + names_[t.to] +
                            " declared twice");
    ts.graph_.add_arc(t.from, t.to, t.weight);
    ts.max_weight_ = std::max(ts.max_weight_, t.weight);
    ts.min_weight_ = std::min(ts.min_weight_, t.weight);
  }
  for (StateId q = 0; q < names_.size(); ++q)
    if (ts.graph_.successors(q).empty())
      throw ValidationError("state '" + names_[q] + "' has no outgoing transition");
  return ts;
}

double run_weight(const TransitionSystem& ts, std::span<const StateId> run) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < run.size(); ++i) {
    const auto w = ts.weight(run[i], run[i + 1]);
    if (!w)
      throw ValidationError("run step " + std::to_string(i) + " is not a transition");
    total += *w;
  }
  return total;
}

std::vector<double> run_times(const TransitionSystem& ts, std::span<const StateId> run) {
  std::vector<double> times;
  if (run.empty()) return times;
  times.push_back(0.0);
  for (std::size_t i = 0; i + 1 < run.size(); ++i) {
    const auto w = ts.weight(run[i], run[i + 1]);
    if (!w)
      throw ValidationError("run step " + std::to_string(i) + " is not a transition");
    times.push_back(times.back() + *w);
  }
  return times;
}

DistanceMatrix all_pairs_min_weight(const TransitionSystem& ts) {
  return floyd_warshall(ts.graph());
}

std::vector<StateId> visibility_set(const DistanceMatrix& dist, StateId q, double v) {
  std::vector<StateId> out;
  const auto row = dist.row(q);
  for (StateId p = 0; p < row.size(); ++p)
    if (row[p] <= v) out.push_back(p);
  return out;
}

VisibilityMap::VisibilityMap(const TransitionSystem& ts, const DistanceMatrix& dist, double range)
    : n_(ts.size()), range_(range), mask_(ts.size() * ts.size(), 0) {
  if (!(range > 0.0)) throw ValidationError("visibility range must be positive");
  for (StateId q = 0; q < n_; ++q) {
    const auto row = dist.row(q);
    for (StateId p = 0; p < n_; ++p) mask_[q * n_ + p] = row[p] <= range ? 1 : 0;
    for (const Arc& a : ts.successors(q)) {
      if (!mask_[q * n_ + a.to])
        throw ValidationError("successor '" + ts.name(a.to) + "' of '" + ts.name(q) +
                              "' lies outside the visibility range");
    }
  }
}

std::vector<FiniteRun> local_runs(const TransitionSystem& ts, const VisibilityMap& visibility,
                                  StateId q, StateId q_k, double h) {
  const auto entry = ts.weight(q_k, q);
  if (!entry) throw ContractError("local_runs: (q_k, q) is not a transition");
  if (h < ts.max_weight())
    throw ContractError("local_runs: horizon is below the largest transition weight");

  std::vector<FiniteRun> runs;
  const auto visible = [&](std::uint32_t s) { return visibility.visible(q_k, s); };
  for_each_local_run(ts.graph(), q, h - *entry, visible,
                     [&](std::span<const std::uint32_t> nodes, std::span<const double>) {
                       runs.push_back({{nodes.begin(), nodes.end()}});
                     });
  return runs;
}

}  // namespace survplan
