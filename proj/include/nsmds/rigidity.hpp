#pragma once

// Necessary-condition validators for global rigidity: vertex connectivity
// via unit-capacity max-flow, and 2D generic rigidity via the (2,3) pebble game.

#include "nsmds/core.hpp"
#include "nsmds/graph.hpp"

#include <utility>
#include <vector>

namespace nsmds {

/// Undirected simple graph; duplicate edges and self-loops are dropped.
class SimpleGraph {
 public:
  explicit SimpleGraph(Index n);

  static SimpleGraph complete(Index n);
  static SimpleGraph path(Index n);
  static SimpleGraph cycle(Index n);
  static SimpleGraph from_anchor_graph(const AnchorGraph& graph);

  void add_edge(Index u, Index v);
  void remove_vertex_edges(Index v);

  [[nodiscard]] Index vertex_count() const { return adjacency_.size(); }
  [[nodiscard]] Index edge_count() const { return edges_.size(); }
  [[nodiscard]] const std::vector<std::pair<Index, Index>>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<std::vector<Index>>& adjacency() const { return adjacency_; }
  [[nodiscard]] bool has_edge(Index u, Index v) const;

 private:
  std::vector<std::vector<Index>> adjacency_;
  std::vector<std::pair<Index, Index>> edges_;
};

/// Connectivity ignoring the vertices flagged in `removed`.
[[nodiscard]] bool is_connected(const SimpleGraph& graph, const std::vector<bool>& removed = {});

/// Number of internally vertex-disjoint s-t paths, stopping once `cap` is reached.
[[nodiscard]] Index local_vertex_connectivity(const SimpleGraph& graph, Index s, Index t, Index cap);

/// True iff no set of fewer than t vertices disconnects the graph (complete
/// graphs count as (n-1)-connected).
[[nodiscard]] bool vertex_connectivity_at_least(const SimpleGraph& graph, Index t);
[[nodiscard]] bool vertex_connectivity_at_least(const AnchorGraph& graph, Index t);

/// Size of a maximal (2,3)-sparse edge subset found by the pebble game.
[[nodiscard]] Index pebble_game_rank_2d(const SimpleGraph& graph);

/// Generic 2D rigidity: the pebble game finds 2n - 3 independent edges.
[[nodiscard]] bool laman_check_2d(const SimpleGraph& graph);
[[nodiscard]] bool laman_check_2d(const AnchorGraph& graph);

}  // namespace nsmds
