#pragma once

// Reference implementations for tests. Each one follows the definition
// directly and shares no code with the library algorithm it checks.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "survplan/product.hpp"
#include "survplan/rng.hpp"
#include "survplan/ts.hpp"

namespace oracle {

using survplan::kInfinity;

// Bellman-Ford style relaxation until nothing changes, from every source.
inline std::vector<std::vector<double>> all_pairs(const survplan::WeightedDigraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInfinity));
  for (std::size_t s = 0; s < n; ++s) {
    d[s][s] = 0.0;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::uint32_t u = 0; u < n; ++u) {
        if (d[s][u] == kInfinity) continue;
        for (const auto& a : g.successors(u))
          if (d[s][u] + a.weight < d[s][a.to]) {
            d[s][a.to] = d[s][u] + a.weight;
            changed = true;
          }
      }
    }
  }
  return d;
}

// Strongly connected components by brute force: u ~ v iff each reaches the other.
inline std::vector<std::vector<char>> reach_matrix(const survplan::WeightedDigraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(s)};
    r[s][s] = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& a : g.successors(u))
        if (!r[s][a.to]) {
          r[s][a.to] = 1;
          stack.push_back(a.to);
        }
    }
  }
  return r;
}

struct InfSets {
  std::vector<char> accepting, surveillance;
};

// A state lies in F-inf (S-inf) iff it is accepting (surveyed) and reaches a
// cycle that contains both an accepting and a surveyed state.
inline InfSets inf_sets(const survplan::ProductAutomaton& p) {
  const auto& g = p.graph();
  const std::size_t n = g.size();
  const auto r = reach_matrix(g);
  std::vector<char> on_good_cycle(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    bool cyclic = false;
    for (const auto& a : g.successors(static_cast<std::uint32_t>(u)))
      if (r[a.to][u]) cyclic = true;
    if (!cyclic) continue;
    bool acc = false, sur = false;
    for (std::size_t v = 0; v < n; ++v)
      if (r[u][v] && r[v][u]) {
        acc = acc || p.accepting(static_cast<survplan::ProductId>(v));
        sur = sur || p.surveillance(static_cast<survplan::ProductId>(v));
      }
    on_good_cycle[u] = acc && sur;
  }
  InfSets out{std::vector<char>(n, 0), std::vector<char>(n, 0)};
  for (std::size_t u = 0; u < n; ++u) {
    bool reaches = false;
    for (std::size_t v = 0; v < n; ++v) reaches = reaches || (r[u][v] && on_good_cycle[v]);
    out.accepting[u] = reaches && p.accepting(static_cast<survplan::ProductId>(u));
    out.surveillance[u] = reaches && p.surveillance(static_cast<survplan::ProductId>(u));
  }
  return out;
}

inline std::vector<double> w_pi(const std::vector<std::vector<double>>& d, const std::vector<char>& sinf) {
  std::vector<double> w(d.size(), kInfinity);
  for (std::size_t p = 0; p < d.size(); ++p)
    for (std::size_t q = 0; q < d.size(); ++q)
      if (sinf[q]) w[p] = std::min(w[p], d[p][q]);
  return w;
}

inline std::vector<survplan::DistancePair> w_phi(const std::vector<std::vector<double>>& d,
                                                 const std::vector<char>& finf,
                                                 const std::vector<char>& sinf) {
  const std::size_t n = d.size();
  std::vector<survplan::DistancePair> w(n);
  for (std::size_t p = 0; p < n; ++p) {
    // W*_{PF pi}(p, p') for every p' in F-inf
    std::vector<double> via(n, kInfinity);
    double best = kInfinity;
    for (std::size_t f = 0; f < n; ++f) {
      if (!finf[f]) continue;
      for (std::size_t s = 0; s < n; ++s)
        if (sinf[s]) via[f] = std::min(via[f], d[p][f] + d[f][s]);
      best = std::min(best, via[f]);
    }
    if (best == kInfinity) continue;
    double u = kInfinity;
    for (std::size_t f = 0; f < n; ++f)
      if (finf[f] && via[f] == best) u = std::min(u, d[p][f]);
    w[p] = {u, best};
  }
  return w;
}

// Random product: every node reachable from 0, integer weights 1..5.
inline survplan::ProductAutomaton random_product(survplan::Rng& rng, std::size_t n, double density,
                                                 double p_acc, double p_sur) {
  survplan::WeightedDigraph g(n);
  std::set<std::pair<std::uint32_t, std::uint32_t>> arcs;
  const auto add = [&](std::uint32_t u, std::uint32_t v) {
    if (arcs.insert({u, v}).second) g.add_arc(u, v, static_cast<double>(rng.uniform_int(1, 5)));
  };
  for (std::uint32_t v = 1; v < n; ++v) add(static_cast<std::uint32_t>(rng.uniform_int(0, v - 1)), v);
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = 0; v < n; ++v)
      if (rng.bernoulli(density)) add(u, v);
  std::vector<survplan::ProductState> states;
  std::vector<char> acc(n), sur(n);
  for (std::uint32_t u = 0; u < n; ++u) {
    states.push_back({u, 0});
    acc[u] = rng.bernoulli(p_acc);
    sur[u] = rng.bernoulli(p_sur);
  }
  return survplan::make_product(std::move(states), std::move(g), std::move(acc), std::move(sur));
}

// All local runs by explicit breadth-first growth of run lists.
struct LocalRun {
  std::vector<std::uint32_t> nodes;
  std::vector<double> offsets;
};

inline std::vector<LocalRun> local_runs(const survplan::WeightedDigraph& g, std::uint32_t start, double budget,
                                        const std::function<bool(std::uint32_t)>& visible) {
  std::vector<LocalRun> all;
  if (budget < 0 || !visible(start)) return all;
  std::vector<LocalRun> frontier{{{start}, {0.0}}};
  while (!frontier.empty()) {
    std::vector<LocalRun> next;
    for (const auto& r : frontier) {
      all.push_back(r);
      for (const auto& a : g.successors(r.nodes.back())) {
        const double w = r.offsets.back() + a.weight;
        if (w > budget || !visible(a.to)) continue;
        LocalRun e = r;
        e.nodes.push_back(a.to);
        e.offsets.push_back(w);
        next.push_back(std::move(e));
      }
    }
    frontier = std::move(next);
  }
  return all;
}

// pot1 / pot2 straight from the table definition.
inline double pot(bool sum, double fallback, const survplan::WeightedDigraph& g,
                  const std::vector<survplan::StateId>& projection, survplan::StateId current,
                  const std::vector<char>& visible, const std::vector<double>& rewards, double horizon,
                  std::uint32_t candidate, double entry_weight) {
  const auto ts = [&](std::uint32_t n) { return projection.empty() ? n : projection[n]; };
  const auto runs = local_runs(g, candidate, horizon - entry_weight,
                               [&](std::uint32_t n) { return visible[ts(n)] != 0; });
  double best = 0.0;
  for (const auto& r : runs) {
    double total = 0.0, top = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const auto q = ts(r.nodes[i]);
      bool repeated = false;
      for (std::size_t j = 0; j < i; ++j) repeated = repeated || ts(r.nodes[j]) == q;
      const double value = rewards[q] - r.offsets[i];
      const double f = (value > 0 && q != current && !repeated) ? value : fallback;
      total += f;
      top = std::max(top, f);
    }
    best = std::max(best, sum ? total : top);
  }
  return best;
}

}  // namespace oracle
