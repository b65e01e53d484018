#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "survplan/graph.hpp"

namespace survplan {

namespace detail {

template <class Graph, class Visible, class Visit>
void extend_local_run(const Graph& g, const Visible& visible, double budget,
                      std::vector<std::uint32_t>& nodes, std::vector<double>& offsets,
                      Visit& visit) {
  visit(std::span<const std::uint32_t>(nodes), std::span<const double>(offsets));
  const std::uint32_t last = nodes.back();
  const double spent = offsets.back();
  for (const Arc& a : g.successors(last)) {
    const double total = spent + a.weight;
    if (total > budget || !visible(a.to)) continue;
    nodes.push_back(a.to);
    offsets.push_back(total);
    extend_local_run(g, visible, budget, nodes, offsets, visit);
    nodes.pop_back();
    offsets.pop_back();
  }
}

}  // namespace detail

/// Depth-first enumeration of every finite run that starts at `start`, has
/// total weight at most `budget` and only passes nodes accepted by `visible`.
///
/// `visit(nodes, offsets)` is called once per run, prefixes included;
/// offsets[i] is the weight of nodes[0..i]. The graph type needs
/// `successors(node) -> span<const Arc>`.
template <class Graph, class Visible, class Visit>
void for_each_local_run(const Graph& g, std::uint32_t start, double budget,
                        const Visible& visible, Visit&& visit) {
  if (budget < 0.0 || !visible(start)) return;
  std::vector<std::uint32_t> nodes{start};
  std::vector<double> offsets{0.0};
  detail::extend_local_run(g, visible, budget, nodes, offsets, visit);
}

}  // namespace survplan
