#include "survplan/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <utility>

namespace survplan {

std::size_t WeightedDigraph::arc_count() const {
  std::size_t n = 0;
  for (const auto& arcs : out_) n += arcs.size();
  return n;
}

std::vector<std::vector<std::uint32_t>> WeightedDigraph::reversed() const {
  std::vector<std::vector<std::uint32_t>> in(out_.size());
  for (std::uint32_t u = 0; u < out_.size(); ++u)
    for (const Arc& a : out_[u]) in[a.to].push_back(u);
  return in;
}

double DistanceMatrix::finite_diameter() const {
  double best = 0.0;
  for (double d : d_)
    if (d != kInfinity) best = std::max(best, d);
  return best;
}

DistanceMatrix floyd_warshall(const WeightedDigraph& g) {
  const std::size_t n = g.size();
  DistanceMatrix d(n);
  for (std::uint32_t u = 0; u < n; ++u) {
    d(u, u) = 0.0;
    for (const Arc& a : g.successors(u)) d(u, a.to) = std::min(d(u, a.to), a.weight);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto row_k = d.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d(i, k);
      if (dik == kInfinity) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double via = dik + row_k[j];
        if (via < d(i, j)) d(i, j) = via;
      }
    }
  }
  return d;
}

std::vector<double> dijkstra(const WeightedDigraph& g, std::uint32_t source) {
  std::vector<double> dist(g.size(), kInfinity);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    auto [du, u] = queue.top();
    queue.pop();
    if (du > dist[u]) continue;
    for (const Arc& a : g.successors(u)) {
      const double dv = du + a.weight;
      if (dv < dist[a.to]) {
        dist[a.to] = dv;
        queue.push({dv, a.to});
      }
    }
  }
  return dist;
}

DistanceMatrix dijkstra_all_pairs(const WeightedDigraph& g) {
  DistanceMatrix d(g.size());
  for (std::uint32_t s = 0; s < g.size(); ++s) {
    const auto row = dijkstra(g, s);
    std::copy(row.begin(), row.end(), &d(s, 0));
  }
  return d;
}

std::vector<char> reachable_from(const WeightedDigraph& g, std::uint32_t source) {
  std::vector<char> seen(g.size(), 0);
  std::vector<std::uint32_t> stack{source};
  seen[source] = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (const Arc& a : g.successors(u)) {
      if (!seen[a.to]) {
        seen[a.to] = 1;
        stack.push_back(a.to);
      }
    }
  }
  return seen;
}

}  // namespace survplan
