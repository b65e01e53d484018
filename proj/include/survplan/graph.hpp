#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "survplan/types.hpp"

namespace survplan {

struct Arc {
  std::uint32_t to;
  double weight;
};

/// Directed graph with positive arc weights, stored as adjacency lists.
class WeightedDigraph {
 public:
  WeightedDigraph() = default;
  explicit WeightedDigraph(std::size_t nodes) : out_(nodes) {}

  std::size_t size() const { return out_.size(); }
  std::size_t arc_count() const;

  std::uint32_t add_node() {
    out_.emplace_back();
    return static_cast<std::uint32_t>(out_.size() - 1);
  }
  void add_arc(std::uint32_t from, std::uint32_t to, double weight) {
    out_[from].push_back({to, weight});
  }

  std::span<const Arc> successors(std::uint32_t node) const { return out_[node]; }

  /// Predecessor lists, built on demand.
  std::vector<std::vector<std::uint32_t>> reversed() const;

 private:
  std::vector<std::vector<Arc>> out_;
};

/// Dense n x n table of minimum run weights; kInfinity marks unreachable.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, kInfinity) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t from, std::size_t to) const { return d_[from * n_ + to]; }
  double& operator()(std::size_t from, std::size_t to) { return d_[from * n_ + to]; }
  std::span<const double> row(std::size_t from) const { return {d_.data() + from * n_, n_}; }

  /// Largest finite entry, 0 for an empty table.
  double finite_diameter() const;

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// All-pairs minimum weights by Floyd-Warshall. O(n^3).
DistanceMatrix floyd_warshall(const WeightedDigraph& g);

/// All-pairs minimum weights by one Dijkstra search per source.
/// O(n m log n); the faster choice for sparse graphs such as products.
DistanceMatrix dijkstra_all_pairs(const WeightedDigraph& g);

std::vector<double> dijkstra(const WeightedDigraph& g, std::uint32_t source);

/// Nodes reachable from `source` (including it), as a membership mask.
std::vector<char> reachable_from(const WeightedDigraph& g, std::uint32_t source);

}  // namespace survplan
