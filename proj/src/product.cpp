#include "survplan/product.hpp"

#include <algorithm>
#include <sstream>

#include "survplan/error.hpp"

namespace survplan {

std::optional<ProductId> ProductAutomaton::find(ProductState s) const {
  for (ProductId p = 0; p < states_.size(); ++p)
    if (states_[p] == s) return p;
  return std::nullopt;
}

ProductAutomaton ProductAutomaton::restrict_to(std::span<const char> keep,
                                               std::vector<ProductId>* old_to_new) const {
  constexpr ProductId kDropped = UINT32_MAX;
  std::vector<ProductId> remap(size(), kDropped);
  ProductAutomaton out;
  if (size() == 0 || !keep[initial()]) {
    if (old_to_new) *old_to_new = std::move(remap);
    return out;
  }

  std::vector<char> reached(size(), 0);
  std::vector<ProductId> stack{initial()};
  reached[initial()] = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (const Arc& a : successors(u)) {
      if (keep[a.to] && !reached[a.to]) {
        reached[a.to] = 1;
        stack.push_back(a.to);
      }
    }
  }
  for (ProductId p = 0; p < size(); ++p) {
    if (!reached[p]) continue;
    remap[p] = static_cast<ProductId>(out.states_.size());
    out.states_.push_back(states_[p]);
    out.accepting_.push_back(accepting_[p]);
    out.surveillance_.push_back(surveillance_[p]);
  }
  out.graph_ = WeightedDigraph(out.states_.size());
  for (ProductId p = 0; p < size(); ++p) {
    if (remap[p] == kDropped) continue;
    for (const Arc& a : successors(p))
      if (remap[a.to] != kDropped) out.graph_.add_arc(remap[p], remap[a.to], a.weight);
  }
  if (old_to_new) *old_to_new = std::move(remap);
  return out;
}

ProductAutomaton build_product(const TransitionSystem& ts, const BuchiAutomaton& ba,
                               PropId surveillance) {
  if (ba.num_propositions() != ts.propositions().size())
    throw ContractError("automaton alphabet does not match the transition system propositions");
  if (ba.size() == 0) throw ContractError("automaton has no states");

  ProductAutomaton p;
  const std::size_t nb = ba.size();
  constexpr ProductId kUnseen = UINT32_MAX;
  std::vector<ProductId> index(ts.size() * nb, kUnseen);

  const auto intern = [&](StateId q, BaState s) {
    auto& slot = index[q * nb + s];
    if (slot == kUnseen) {
      slot = static_cast<ProductId>(p.states_.size());
      p.states_.push_back({q, s});
      p.graph_.add_node();
      p.accepting_.push_back(ba.accepting(s) ? 1 : 0);
      p.surveillance_.push_back(ts.has(q, surveillance) ? 1 : 0);
    }
    return slot;
  };

  intern(ts.initial(), ba.initial());
  for (ProductId u = 0; u < p.states_.size(); ++u) {
    const auto [q, s] = p.states_[u];
    const LabelSet letter = ts.label(q);  // the source state's label is read
    const auto ba_succ = ba.successors(s, letter);
    for (const Arc& t : ts.successors(q))
      for (const auto& e : ba_succ) p.graph_.add_arc(u, intern(t.to, e.target), t.weight);
  }
  return p;
}

ProductAutomaton make_product(std::vector<ProductState> states, WeightedDigraph graph,
                              std::vector<char> accepting, std::vector<char> surveillance) {
  if (graph.size() != states.size() || accepting.size() != states.size() ||
      surveillance.size() != states.size())
    throw ValidationError("product parts disagree in size");
  ProductAutomaton p;
  p.states_ = std::move(states);
  p.graph_ = std::move(graph);
  p.accepting_ = std::move(accepting);
  p.surveillance_ = std::move(surveillance);
  return p;
}

bool InfinitySets::empty() const {
  return std::none_of(accepting.begin(), accepting.end(), [](char c) { return c != 0; });
}

namespace {

// reach[x] = 1 iff some member of `targets` is reachable from x.
std::vector<char> reaches_any(const DistanceMatrix& dist, std::span<const char> targets) {
  const std::size_t n = dist.size();
  std::vector<std::size_t> members;
  for (std::size_t t = 0; t < n; ++t)
    if (targets[t]) members.push_back(t);
  std::vector<char> reach(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    const auto row = dist.row(x);
    for (auto t : members) {
      if (row[t] != kInfinity) {
        reach[x] = 1;
        break;
      }
    }
  }
  return reach;
}

// Removes members of `set` none of whose successors reaches `other`.
bool prune(const ProductAutomaton& p, const DistanceMatrix& dist, std::vector<char>& set,
           std::span<const char> other) {
  const auto reach = reaches_any(dist, other);
  bool changed = false;
  for (ProductId x = 0; x < p.size(); ++x) {
    if (!set[x]) continue;
    const auto succ = p.successors(x);
    const bool live = std::any_of(succ.begin(), succ.end(), [&](const Arc& a) { return reach[a.to] != 0; });
    if (!live) {
      set[x] = 0;
      changed = true;
    }
  }
  return changed;
}

}  // namespace

InfinitySets compute_inf_sets(const ProductAutomaton& p, const DistanceMatrix& dist) {
  InfinitySets inf;
  inf.accepting.assign(p.accepting_mask().begin(), p.accepting_mask().end());
  inf.surveillance.assign(p.surveillance_mask().begin(), p.surveillance_mask().end());
  bool changed = true;
  while (changed) {
    changed = prune(p, dist, inf.accepting, inf.surveillance);
    changed = prune(p, dist, inf.surveillance, inf.accepting) || changed;
  }
  return inf;
}

std::vector<double> surveillance_distances(const DistanceMatrix& dist, const InfinitySets& inf) {
  const std::size_t n = dist.size();
  std::vector<double> out(n, kInfinity);
  for (std::size_t x = 0; x < n; ++x) {
    const auto row = dist.row(x);
    for (std::size_t t = 0; t < n; ++t)
      if (inf.surveillance[t]) out[x] = std::min(out[x], row[t]);
  }
  return out;
}

std::vector<DistancePair> mission_distances(const DistanceMatrix& dist, const InfinitySets& inf,
                                            std::span<const double> to_surveillance) {
  const std::size_t n = dist.size();
  std::vector<DistancePair> out(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto row = dist.row(x);
    DistancePair best;
    for (std::size_t f = 0; f < n; ++f) {
      if (!inf.accepting[f] || row[f] == kInfinity || to_surveillance[f] == kInfinity) continue;
      const double through = row[f] + to_surveillance[f];
      if (through < best.v || (through == best.v && row[f] < best.u)) best = {row[f], through};
    }
    out[x] = best;
  }
  return out;
}

ProductAutomaton trim(const ProductAutomaton& p, std::span<const double> to_surveillance,
                      std::span<const DistancePair> to_mission,
                      std::vector<ProductId>* old_to_new) {
  std::vector<char> keep(p.size(), 0);
  for (ProductId x = 0; x < p.size(); ++x)
    keep[x] = to_surveillance[x] != kInfinity && !to_mission[x].infinite();
  return p.restrict_to(keep, old_to_new);
}

Indicators compute_indicators(const ProductAutomaton& p, std::span<const double> to_surveillance,
                              std::span<const DistancePair> to_mission) {
  Indicators ind;
  ind.surveillance.resize(p.size());
  ind.mission.resize(p.size());
  for (ProductId x = 0; x < p.size(); ++x) {
    for (const Arc& a : p.successors(x)) {
      ind.surveillance[x].push_back(to_surveillance[x] > to_surveillance[a.to] ? 1 : 0);
      ind.mission[x].push_back(strictly_less(to_mission[a.to], to_mission[x]) ? 1 : 0);
    }
  }
  return ind;
}

std::optional<std::string> find_indicator_gap(const ProductAutomaton& p, const InfinitySets& inf,
                                              const Indicators& ind) {
  const auto any = [](const std::vector<char>& v) {
    return std::any_of(v.begin(), v.end(), [](char c) { return c != 0; });
  };
  for (ProductId x = 0; x < p.size(); ++x) {
    if (!inf.surveillance[x] && !any(ind.surveillance[x]))
      return "state " + std::to_string(x) + " has no transition shortening the surveillance distance";
    if (!inf.accepting[x] && !any(ind.mission[x]))
      return "state " + std::to_string(x) + " has no transition shortening the mission distance";
  }
  return std::nullopt;
}

bool check_accepting_label_condition(const BuchiAutomaton& ba, PropId surveillance) {
  for (BaState s = 0; s < ba.size(); ++s)
    for (const auto& e : ba.edges(s))
      if (ba.accepting(e.target) && !has_prop(e.letter, surveillance)) return false;
  return true;
}

bool PreparedProduct::feasible() const { return product.size() > 0 && !inf.empty(); }

PreparedProduct prepare_product(const ProductAutomaton& product) {
  PreparedProduct out;
  out.untrimmed_size = product.size();

  const DistanceMatrix dist = dijkstra_all_pairs(product.graph());
  const InfinitySets inf = compute_inf_sets(product, dist);
  const auto to_sur = surveillance_distances(dist, inf);
  const auto to_mis = mission_distances(dist, inf, to_sur);

  std::vector<ProductId> remap;
  out.product = trim(product, to_sur, to_mis, &remap);

  const std::size_t n = out.product.size();
  out.inf.accepting.assign(n, 0);
  out.inf.surveillance.assign(n, 0);
  for (ProductId x = 0; x < product.size(); ++x) {
    if (remap[x] == UINT32_MAX) continue;
    out.inf.accepting[remap[x]] = inf.accepting[x];
    out.inf.surveillance[remap[x]] = inf.surveillance[x];
  }
  if (n == 0) return out;

  out.distances = dijkstra_all_pairs(out.product.graph());
  out.to_surveillance = surveillance_distances(out.distances, out.inf);
  out.to_mission = mission_distances(out.distances, out.inf, out.to_surveillance);
  out.indicators = compute_indicators(out.product, out.to_surveillance, out.to_mission);
  if (auto gap = find_indicator_gap(out.product, out.inf, out.indicators))
    throw InternalError("trimmed product violates the indicator guarantee: " + *gap);
  return out;
}

std::string dump(const PreparedProduct& prepared, const TransitionSystem& ts) {
  std::ostringstream out;
  const auto& p = prepared.product;
  out << "# id\tts\tba\taccepting\tsurveillance\tf_inf\ts_inf\tw_pi\tw_phi_u\tw_phi_v\n";
  for (ProductId x = 0; x < p.size(); ++x) {
    out << x << '\t' << ts.name(p.state(x).ts) << '\t' << p.state(x).ba << '\t'
        << int(p.accepting(x)) << '\t' << int(p.surveillance(x)) << '\t'
        << int(prepared.inf.accepting[x]) << '\t' << int(prepared.inf.surveillance[x]) << '\t'
        << prepared.to_surveillance[x] << '\t' << prepared.to_mission[x].u << '\t'
        << prepared.to_mission[x].v << '\n';
  }
  out << "# from\tto\tweight\ti_pi\ti_phi\n";
  for (ProductId x = 0; x < p.size(); ++x) {
    const auto succ = p.successors(x);
    for (std::size_t i = 0; i < succ.size(); ++i)
      out << x << '\t' << succ[i].to << '\t' << succ[i].weight << '\t'
          << int(prepared.indicators.surveillance[x][i]) << '\t'
          << int(prepared.indicators.mission[x][i]) << '\n';
  }
  return out.str();
}

}  // namespace survplan
