#include "survplan/buchi.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "survplan/error.hpp"

namespace survplan {

BuchiAutomaton::BuchiAutomaton(std::size_t num_propositions) : num_props_(num_propositions) {
  if (num_propositions > kMaxPropositions)
    throw ValidationError("automaton alphabet is limited to " +
                          std::to_string(kMaxPropositions) + " propositions");
}

BaState BuchiAutomaton::add_state(bool accepting) {
  accepting_.push_back(accepting ? 1 : 0);
  edges_.emplace_back();
  return static_cast<BaState>(edges_.size() - 1);
}

void BuchiAutomaton::add_transition(BaState from, LabelSet letter, BaState to) {
  if (from >= size() || to >= size()) throw ValidationError("automaton transition endpoint");
  if (letter >= alphabet_size()) throw ValidationError("automaton letter outside 2^Props");
  auto& out = edges_[from];
  const Edge e{letter, to};
  auto it = std::lower_bound(out.begin(), out.end(), e);
  if (it == out.end() || *it != e) out.insert(it, e);
}

std::size_t BuchiAutomaton::accepting_count() const {
  return static_cast<std::size_t>(std::count(accepting_.begin(), accepting_.end(), 1));
}

std::size_t BuchiAutomaton::transition_count() const {
  std::size_t n = 0;
  for (const auto& e : edges_) n += e.size();
  return n;
}

std::span<const BuchiAutomaton::Edge> BuchiAutomaton::successors(BaState s, LabelSet letter) const {
  const auto& out = edges_[s];
  auto lo = std::lower_bound(out.begin(), out.end(), letter,
                             [](const Edge& e, LabelSet l) { return e.letter < l; });
  auto hi = lo;
  while (hi != out.end() && hi->letter == letter) ++hi;
  return {lo, hi};
}

namespace {

// ---------------------------------------------------------------------------
// Negation normal form with hash-consed nodes.

enum class Kind : std::uint8_t { True, False, Lit, NegLit, And, Or, Next, Until, Release };

struct NnfNode {
  Kind kind;
  PropId prop;
  std::uint32_t a, b;
};

class NnfStore {
 public:
  std::uint32_t make(Kind k, PropId p = 0, std::uint32_t a = 0, std::uint32_t b = 0) {
    // constant folding keeps the tableau free of trivially dead branches
    if (k == Kind::And) {
      if (is(a, Kind::False) || is(b, Kind::False)) return make(Kind::False);
      if (is(a, Kind::True) || a == b) return b;
      if (is(b, Kind::True)) return a;
      if (a > b) std::swap(a, b);
    } else if (k == Kind::Or) {
      if (is(a, Kind::True) || is(b, Kind::True)) return make(Kind::True);
      if (is(a, Kind::False) || a == b) return b;
      if (is(b, Kind::False)) return a;
      if (a > b) std::swap(a, b);
    }
    const auto key = std::make_tuple(k, p, a, b);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({k, p, a, b});
    index_.emplace(key, id);
    if (k == Kind::Until) {
      if (untils_.size() >= 64) throw ValidationError("formula has more than 64 until operators");
      until_index_.emplace(id, static_cast<unsigned>(untils_.size()));
      untils_.push_back(id);
    }
    return id;
  }

  const NnfNode& operator[](std::uint32_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t until_count() const { return untils_.size(); }
  unsigned until_index(std::uint32_t id) const { return until_index_.at(id); }

  std::uint32_t from(const ltl::Formula& f, bool positive) {
    using ltl::Op;
    switch (f.op()) {
      case Op::True: return make(positive ? Kind::True : Kind::False);
      case Op::Atom: return make(positive ? Kind::Lit : Kind::NegLit, f.atom());
      case Op::Not: return from(f.lhs(), !positive);
      case Op::Or:
      case Op::And: {
        const auto a = from(f.lhs(), positive);
        const auto b = from(f.rhs(), positive);
        const bool conj = (f.op() == Op::And) == positive;
        return make(conj ? Kind::And : Kind::Or, 0, a, b);
      }
      case Op::Next: return make(Kind::Next, 0, from(f.lhs(), positive));
      case Op::Until: {
        const auto a = from(f.lhs(), positive);
        const auto b = from(f.rhs(), positive);
        return make(positive ? Kind::Until : Kind::Release, 0, a, b);
      }
      case Op::Always: {
        const auto a = from(f.lhs(), positive);
        return positive ? make(Kind::Release, 0, make(Kind::False), a)
                        : make(Kind::Until, 0, make(Kind::True), a);
      }
      case Op::Eventually: {
        const auto a = from(f.lhs(), positive);
        return positive ? make(Kind::Until, 0, make(Kind::True), a)
                        : make(Kind::Release, 0, make(Kind::False), a);
      }
    }
    throw InternalError("unknown LTL operator");
  }

 private:
  bool is(std::uint32_t id, Kind k) const { return nodes_[id].kind == k; }

  std::vector<NnfNode> nodes_;
  std::map<std::tuple<Kind, PropId, std::uint32_t, std::uint32_t>, std::uint32_t> index_;
  std::vector<std::uint32_t> untils_;
  std::unordered_map<std::uint32_t, unsigned> until_index_;
};

// ---------------------------------------------------------------------------
// Tableau expansion.
//
// A tableau state is the set of obligations that must hold from the current
// position on. Expanding it yields alternatives, each fixing literals for the
// current letter, the obligations for the next position, and the untils whose
// fulfilment was postponed.

using Obligations = std::vector<std::uint32_t>;

struct Alternative {
  LabelSet pos = 0, neg = 0;
  Obligations next;
  std::uint64_t postponed = 0;
};

class Expander {
 public:
  explicit Expander(const NnfStore& store) : store_(store) {}

  std::vector<Alternative> expand(const Obligations& gamma) const {
    struct Work {
      Alternative alt;
      std::vector<std::uint32_t> todo;
      std::vector<char> done;
    };
    std::vector<Alternative> out;
    std::vector<Work> stack;
    stack.push_back({{}, gamma, std::vector<char>(store_.size(), 0)});

    while (!stack.empty()) {
      Work w = std::move(stack.back());
      stack.pop_back();
      bool alive = true;
      while (alive && !w.todo.empty()) {
        const auto id = w.todo.back();
        w.todo.pop_back();
        if (w.done[id]) continue;
        w.done[id] = 1;
        const NnfNode& n = store_[id];
        switch (n.kind) {
          case Kind::True: break;
          case Kind::False: alive = false; break;
          case Kind::Lit:
            if (has_prop(w.alt.neg, n.prop)) alive = false;
            w.alt.pos |= prop_bit(n.prop);
            break;
          case Kind::NegLit:
            if (has_prop(w.alt.pos, n.prop)) alive = false;
            w.alt.neg |= prop_bit(n.prop);
            break;
          case Kind::And:
            w.todo.push_back(n.a);
            w.todo.push_back(n.b);
            break;
          case Kind::Or:
            if (w.done[n.a] || w.done[n.b]) break;
            {
              Work other = w;
              other.todo.push_back(n.b);
              stack.push_back(std::move(other));
            }
            w.todo.push_back(n.a);
            break;
          case Kind::Next:
            w.alt.next.push_back(n.a);
            break;
          case Kind::Until:
            // fulfil now (b) or postpone (a & X(a U b))
            if (!w.done[n.b]) {
              Work later = w;
              later.todo.push_back(n.a);
              later.alt.next.push_back(id);
              later.alt.postponed |= std::uint64_t{1} << store_.until_index(id);
              stack.push_back(std::move(later));
            }
            w.todo.push_back(n.b);
            break;
          case Kind::Release:
            // release now (a & b) or keep holding (b & X(a R b))
            {
              Work hold = w;
              hold.todo.push_back(n.b);
              hold.alt.next.push_back(id);
              stack.push_back(std::move(hold));
            }
            w.todo.push_back(n.a);
            w.todo.push_back(n.b);
            break;
        }
      }
      if (!alive) continue;
      auto& next = w.alt.next;
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      out.push_back(std::move(w.alt));
    }
    return out;
  }

 private:
  const NnfStore& store_;
};

}  // namespace

BuchiAutomaton to_buchi(const ltl::Formula& formula, std::size_t num_propositions) {
  NnfStore store;
  const std::uint32_t root = store.from(formula, true);
  const Expander expander(store);

  const unsigned k = static_cast<unsigned>(store.until_count());
  const std::uint64_t all_conditions = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  const LabelSet all_props = static_cast<LabelSet>((std::size_t{1} << num_propositions) - 1);

  // Generalized transitions of one tableau state, grouped by (letter, target)
  // and keeping only the maximal acceptance masks.
  struct Move {
    LabelSet letter;
    std::uint32_t target;
    std::uint64_t acc;
  };
  std::map<Obligations, std::uint32_t> tableau_ids;
  std::vector<Obligations> tableau_states;
  std::vector<std::vector<Move>> moves;

  const auto intern = [&](const Obligations& gamma) {
    auto [it, fresh] = tableau_ids.emplace(gamma, static_cast<std::uint32_t>(tableau_states.size()));
    if (fresh) tableau_states.push_back(gamma);
    return it->second;
  };

  const auto moves_of = [&](std::uint32_t t) -> const std::vector<Move>& {
    if (t < moves.size()) return moves[t];
    while (moves.size() <= t) {
      const auto current = static_cast<std::uint32_t>(moves.size());
      std::map<std::pair<LabelSet, std::uint32_t>, std::vector<std::uint64_t>> grouped;
      for (const Alternative& alt : expander.expand(tableau_states[current])) {
        const std::uint32_t target = intern(alt.next);
        const std::uint64_t acc = all_conditions & ~alt.postponed;
        const LabelSet free = all_props & ~alt.pos & ~alt.neg;
        // every letter containing pos and avoiding neg
        for (LabelSet sub = free;; sub = (sub - 1) & free) {
          auto& masks = grouped[{alt.pos | sub, target}];
          const bool dominated = std::any_of(masks.begin(), masks.end(), [&](std::uint64_t m) {
            return (m & acc) == acc;
          });
          if (!dominated) {
            std::erase_if(masks, [&](std::uint64_t m) { return (m & acc) == m; });
            masks.push_back(acc);
          }
          if (sub == 0) break;
        }
      }
      // A target carrying a strict superset of a sibling's obligations on
      // the same letter accepts fewer words, so its moves are redundant.
      const auto subsumed = [&](LabelSet letter, std::uint32_t target) {
        const Obligations& mine = tableau_states[target];
        for (auto it = grouped.lower_bound({letter, 0}); it != grouped.end() && it->first.first == letter; ++it) {
          const Obligations& other = tableau_states[it->first.second];
          if (it->first.second != target && other.size() < mine.size() &&
              std::includes(mine.begin(), mine.end(), other.begin(), other.end()))
            return true;
        }
        return false;
      };
      std::vector<Move> list;
      for (const auto& [key, masks] : grouped) {
        if (subsumed(key.first, key.second)) continue;
        for (auto m : masks) list.push_back({key.first, key.second, m});
      }
      moves.push_back(std::move(list));
    }
    return moves[t];
  };

  // Degeneralize with a level counter: level k (or every state when there
  // are no conditions) is accepting.
  BuchiAutomaton ba(num_propositions);
  std::map<std::pair<std::uint32_t, unsigned>, BaState> ids;
  std::vector<std::pair<std::uint32_t, unsigned>> queue;
  const auto state_of = [&](std::uint32_t t, unsigned level) {
    auto [it, fresh] = ids.emplace(std::make_pair(t, level), 0);
    if (fresh) {
      it->second = ba.add_state(k == 0 || level == k);
      queue.emplace_back(t, level);
    }
    return it->second;
  };

  ba.set_initial(state_of(intern({root}), 0));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [t, level] = queue[head];
    const BaState from = ids.at({t, level});
    const std::vector<Move> list = moves_of(t);
    for (const Move& m : list) {
      unsigned next_level = level == k ? 0 : level;
      while (next_level < k && ((m.acc >> next_level) & 1U)) ++next_level;
      ba.add_transition(from, m.letter, state_of(m.target, next_level));
    }
  }
  return prune_by_simulation(ba);
}

BuchiAutomaton prune_by_simulation(const BuchiAutomaton& ba) {
  const std::size_t n = ba.size();
  const std::size_t letters = ba.alphabet_size();
  // sim[y * n + z]: z simulates y. Start from the acceptance constraint and
  // remove pairs until every move of y is matched by z.
  std::vector<char> sim(n * n, 0);
  for (BaState y = 0; y < n; ++y)
    for (BaState z = 0; z < n; ++z) sim[y * n + z] = !ba.accepting(y) || ba.accepting(z);
  bool changed = true;
  while (changed) {
    changed = false;
    for (BaState y = 0; y < n; ++y)
      for (BaState z = 0; z < n; ++z) {
        if (y == z || !sim[y * n + z]) continue;
        bool ok = true;
        for (LabelSet l = 0; ok && l < letters; ++l) {
          const auto zs = ba.successors(z, l);
          for (const auto& e : ba.successors(y, l)) {
            const bool matched = std::any_of(zs.begin(), zs.end(),
                                             [&](const auto& f) { return sim[e.target * n + f.target]; });
            if (!matched) {
              ok = false;
              break;
            }
          }
        }
        if (!ok) {
          sim[y * n + z] = 0;
          changed = true;
        }
      }
  }

  const auto dominated = [&](BaState y, std::span<const BuchiAutomaton::Edge> siblings) {
    return std::any_of(siblings.begin(), siblings.end(), [&](const auto& f) {
      const BaState z = f.target;
      return z != y && sim[y * n + z] && (!sim[z * n + y] || z < y);
    });
  };

  BuchiAutomaton out(ba.num_propositions());
  std::vector<BaState> remap(n, UINT32_MAX);
  std::vector<BaState> queue{ba.initial()};
  remap[ba.initial()] = out.add_state(ba.accepting(ba.initial()));
  out.set_initial(remap[ba.initial()]);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const BaState s = queue[head];
    for (LabelSet l = 0; l < letters; ++l) {
      const auto targets = ba.successors(s, l);
      for (const auto& e : targets) {
        if (dominated(e.target, targets)) continue;
        if (remap[e.target] == UINT32_MAX) {
          remap[e.target] = out.add_state(ba.accepting(e.target));
          queue.push_back(e.target);
        }
        out.add_transition(remap[s], l, remap[e.target]);
      }
    }
  }
  return out;
}

namespace {

// Product of an automaton with the position graph of a lasso.
class LassoProduct {
 public:
  LassoProduct(const BuchiAutomaton& ba, std::span<const LabelSet> stem,
               std::span<const LabelSet> loop)
      : ba_(ba), loop_start_(stem.size()) {
    word_.assign(stem.begin(), stem.end());
    word_.insert(word_.end(), loop.begin(), loop.end());
  }

  std::size_t positions() const { return word_.size(); }
  std::size_t node_count() const { return ba_.size() * word_.size(); }
  std::size_t node(BaState s, std::size_t pos) const { return s * word_.size() + pos; }
  BaState state(std::size_t node) const { return static_cast<BaState>(node / word_.size()); }
  std::size_t pos(std::size_t node) const { return node % word_.size(); }
  std::size_t next_pos(std::size_t p) const { return p + 1 < word_.size() ? p + 1 : loop_start_; }

  template <class F>
  void for_each_successor(std::size_t n, F&& f) const {
    const std::size_t p = pos(n);
    const std::size_t np = next_pos(p);
    for (const auto& e : ba_.successors(state(n), word_[p])) f(node(e.target, np));
  }

  bool accepting(std::size_t n) const { return ba_.accepting(state(n)); }

 private:
  const BuchiAutomaton& ba_;
  std::vector<LabelSet> word_;
  std::size_t loop_start_;
};

// Iterative Tarjan restricted to nodes reachable from `root`. Returns an
// accepting node that lies on a cycle, if any.
std::optional<std::size_t> find_accepting_cycle_node(const LassoProduct& g, std::size_t root) {
  const std::size_t n = g.node_count();
  constexpr std::uint32_t kUnvisited = UINT32_MAX;
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> scc_stack;
  struct Frame {
    std::size_t node;
    std::vector<std::size_t> succ;
    std::size_t next = 0;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;

  const auto push = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    scc_stack.push_back(static_cast<std::uint32_t>(v));
    on_stack[v] = 1;
    Frame f{v, {}, 0};
    g.for_each_successor(v, [&](std::size_t w) { f.succ.push_back(w); });
    call.push_back(std::move(f));
  };

  push(root);
  while (!call.empty()) {
    Frame& f = call.back();
    if (f.next < f.succ.size()) {
      const std::size_t w = f.succ[f.next++];
      if (index[w] == kUnvisited) {
        push(w);
      } else if (on_stack[w]) {
        low[f.node] = std::min(low[f.node], index[w]);
      }
      continue;
    }
    const std::size_t v = f.node;
    const bool self_loop = std::find(f.succ.begin(), f.succ.end(), v) != f.succ.end();
    call.pop_back();
    if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
    if (low[v] != index[v]) continue;

    std::vector<std::uint32_t> component;
    std::uint32_t w;
    do {
      w = scc_stack.back();
      scc_stack.pop_back();
      on_stack[w] = 0;
      component.push_back(w);
    } while (w != v);
    if (component.size() == 1 && !self_loop) continue;
    for (auto c : component)
      if (g.accepting(c)) return c;
  }
  return std::nullopt;
}

// Shortest path (by steps) from `from` to `to` through at least one edge.
std::vector<std::size_t> path_between(const LassoProduct& g, std::size_t from, std::size_t to,
                                      bool nonempty) {
  std::vector<std::size_t> parent(g.node_count(), SIZE_MAX);
  std::vector<std::size_t> queue;
  std::vector<char> seen(g.node_count(), 0);
  if (!nonempty && from == to) return {from};
  queue.push_back(from);
  if (!nonempty) seen[from] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    bool found = false;
    g.for_each_successor(u, [&](std::size_t w) {
      if (found || seen[w]) return;
      seen[w] = 1;
      parent[w] = u;
      if (w == to) {
        found = true;
        return;
      }
      queue.push_back(w);
    });
    if (found) break;
  }
  if (!seen[to]) return {};
  std::vector<std::size_t> path{to};
  std::size_t cur = to;
  do {
    cur = parent[cur];
    path.push_back(cur);
  } while (cur != from);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::optional<LassoRun> accepting_lasso_run(const BuchiAutomaton& ba,
                                            std::span<const LabelSet> stem,
                                            std::span<const LabelSet> loop) {
  if (loop.empty()) throw ContractError("lasso loop must be nonempty");
  if (ba.size() == 0) return std::nullopt;
  const LassoProduct g(ba, stem, loop);
  const std::size_t root = g.node(ba.initial(), 0);
  const auto target = find_accepting_cycle_node(g, root);
  if (!target) return std::nullopt;

  auto stem_path = path_between(g, root, *target, false);
  const auto cycle = path_between(g, *target, *target, true);
  LassoRun run;
  run.cycle_start = stem_path.size() - 1;
  stem_path.pop_back();
  for (auto n : stem_path) {
    run.states.push_back(g.state(n));
    run.positions.push_back(g.pos(n));
  }
  for (std::size_t i = 0; i + 1 < cycle.size(); ++i) {
    run.states.push_back(g.state(cycle[i]));
    run.positions.push_back(g.pos(cycle[i]));
  }
  return run;
}

bool lasso_accepts(const BuchiAutomaton& ba, std::span<const LabelSet> stem,
                   std::span<const LabelSet> loop) {
  if (loop.empty()) throw ContractError("lasso loop must be nonempty");
  if (ba.size() == 0) return false;
  const LassoProduct g(ba, stem, loop);
  return find_accepting_cycle_node(g, g.node(ba.initial(), 0)).has_value();
}

std::string to_text(const BuchiAutomaton& ba, const PropositionTable& props) {
  std::ostringstream out;
  out << "states " << ba.size() << "\ninitial " << ba.initial() << "\naccepting";
  for (BaState s = 0; s < ba.size(); ++s)
    if (ba.accepting(s)) out << ' ' << s;
  out << '\n';
  for (BaState s = 0; s < ba.size(); ++s)
    for (const auto& e : ba.edges(s)) out << s << ' ' << props.format(e.letter) << ' ' << e.target << '\n';
  return out.str();
}

}  // namespace survplan
