#include "nsmds/rigidity.hpp"

#include "nsmds/error.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace nsmds {

SimpleGraph::SimpleGraph(Index n) : adjacency_(n) {}

SimpleGraph SimpleGraph::complete(Index n) {
  SimpleGraph g(n);
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) g.add_edge(u, v);
  }
  return g;
}

SimpleGraph SimpleGraph::path(Index n) {
  SimpleGraph g(n);
  for (Index u = 0; u + 1 < n; ++u) g.add_edge(u, u + 1);
  return g;
}

SimpleGraph SimpleGraph::cycle(Index n) {
  SimpleGraph g = path(n);
  if (n >= 3) g.add_edge(n - 1, 0);
  return g;
}

SimpleGraph SimpleGraph::from_anchor_graph(const AnchorGraph& graph) {
  SimpleGraph g(graph.n);
  for (const auto& e : graph.global_edges) g.add_edge(e.i, e.j);
  for (Index v = 0; v < graph.local_edges.size(); ++v) {
    for (const auto& e : graph.local_edges[v]) g.add_edge(v, e.anchor);
  }
  return g;
}

bool SimpleGraph::has_edge(Index u, Index v) const {
  const auto& adj = adjacency_[u];
  return std::find(adj.begin(), adj.end(), v) != adj.end();
}

void SimpleGraph::add_edge(Index u, Index v) {
  if (u >= vertex_count() || v >= vertex_count()) throw InvalidInput("edge endpoint out of range");
  if (u == v || has_edge(u, v)) return;
  adjacency_[u].push_back(v);
  adjacency_[v].push_back(u);
  edges_.emplace_back(std::min(u, v), std::max(u, v));
}

void SimpleGraph::remove_vertex_edges(Index v) {
  for (Index w : adjacency_[v]) {
    auto& adj = adjacency_[w];
    adj.erase(std::remove(adj.begin(), adj.end(), v), adj.end());
  }
  adjacency_[v].clear();
  edges_.erase(std::remove_if(edges_.begin(), edges_.end(),
                              [v](const auto& e) { return e.first == v || e.second == v; }),
               edges_.end());
}

bool is_connected(const SimpleGraph& graph, const std::vector<bool>& removed) {
  const Index n = graph.vertex_count();
  auto gone = [&](Index v) { return !removed.empty() && removed[v]; };
  Index start = n;
  Index alive = 0;
  for (Index v = 0; v < n; ++v) {
    if (!gone(v)) {
      ++alive;
      if (start == n) start = v;
    }
  }
  if (alive <= 1) return true;
  std::vector<bool> seen(n, false);
  std::vector<Index> stack{start};
  seen[start] = true;
  Index reached = 1;
  while (!stack.empty()) {
    const Index u = stack.back();
    stack.pop_back();
    for (Index w : graph.adjacency()[u]) {
      if (seen[w] || gone(w)) continue;
      seen[w] = true;
      ++reached;
      stack.push_back(w);
    }
  }
  return reached == alive;
}

namespace {

// Unit vertex capacities through the split transform v -> (v_in, v_out).
class SplitFlowNetwork {
 public:
  explicit SplitFlowNetwork(const SimpleGraph& graph) : nodes_(2 * graph.vertex_count()), adjacency_(nodes_) {
    for (Index v = 0; v < graph.vertex_count(); ++v) add_arc(in(v), out(v), 1);
    for (const auto& [u, v] : graph.edges()) {
      add_arc(out(u), in(v), kInfinite);
      add_arc(out(v), in(u), kInfinite);
    }
    base_capacity_ = capacity_;
  }

  Index max_flow(Index s, Index t, Index cap) {
    capacity_ = base_capacity_;
    const Index source = out(s);
    const Index sink = in(t);
    Index flow = 0;
    std::vector<Index> parent_arc(nodes_);
    while (flow < cap) {
      std::fill(parent_arc.begin(), parent_arc.end(), kNone);
      std::queue<Index> frontier;
      frontier.push(source);
      parent_arc[source] = kRoot;
      while (!frontier.empty() && parent_arc[sink] == kNone) {
        const Index u = frontier.front();
        frontier.pop();
        for (Index arc : adjacency_[u]) {
          const Index w = head_[arc];
          if (capacity_[arc] == 0 || parent_arc[w] != kNone) continue;
          parent_arc[w] = arc;
          frontier.push(w);
        }
      }
      if (parent_arc[sink] == kNone) break;
      for (Index w = sink; w != source;) {
        const Index arc = parent_arc[w];
        capacity_[arc] -= 1;
        capacity_[arc ^ 1] += 1;
        w = head_[arc ^ 1];
      }
      ++flow;
    }
    return flow;
  }

 private:
  static constexpr Index kInfinite = std::numeric_limits<Index>::max() / 4;
  static constexpr Index kNone = std::numeric_limits<Index>::max();
  static constexpr Index kRoot = kNone - 1;

  static Index in(Index v) { return 2 * v; }
  static Index out(Index v) { return 2 * v + 1; }

  void add_arc(Index from, Index to, Index capacity) {
    adjacency_[from].push_back(head_.size());
    head_.push_back(to);
    capacity_.push_back(capacity);
    adjacency_[to].push_back(head_.size());
    head_.push_back(from);
    capacity_.push_back(0);
  }

  Index nodes_;
  std::vector<std::vector<Index>> adjacency_;
  std::vector<Index> head_;
  std::vector<Index> capacity_;
  std::vector<Index> base_capacity_;
};

}  // namespace

Index local_vertex_connectivity(const SimpleGraph& graph, Index s, Index t, Index cap) {
  if (s >= graph.vertex_count() || t >= graph.vertex_count() || s == t) throw InvalidInput("local connectivity needs two distinct vertices");
  if (graph.has_edge(s, t)) throw InvalidInput("local vertex connectivity is undefined for adjacent vertices");
  SplitFlowNetwork network(graph);
  return network.max_flow(s, t, cap);
}

bool vertex_connectivity_at_least(const SimpleGraph& graph, Index t) {
  const Index n = graph.vertex_count();
  if (t == 0) return true;
  if (n <= t) return false;  // even K_n is only (n-1)-connected
  if (!is_connected(graph)) return false;
  // Any cut C with |C| < t misses one of the first t vertices, which is then
  // separated by C from some non-neighbour.
  SplitFlowNetwork network(graph);
  for (Index s = 0; s < t; ++s) {
    for (Index w = 0; w < n; ++w) {
      if (w == s || graph.has_edge(s, w)) continue;
      if (network.max_flow(s, w, t) < t) return false;
    }
  }
  return true;
}

bool vertex_connectivity_at_least(const AnchorGraph& graph, Index t) {
  return vertex_connectivity_at_least(SimpleGraph::from_anchor_graph(graph), t);
}

Index pebble_game_rank_2d(const SimpleGraph& graph) {
  const Index n = graph.vertex_count();
  std::vector<int> pebbles(n, 2);
  std::vector<std::vector<Index>> out(n);  // accepted edges, oriented away from the vertex holding their pebble

  // Moves one free pebble onto `root` along a directed path, avoiding `blocked`.
  auto fetch = [&](Index root, Index blocked) {
    std::vector<Index> parent(n, n);
    std::vector<bool> seen(n, false);
    std::vector<Index> stack{root};
    seen[root] = true;
    seen[blocked] = true;
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index w : out[u]) {
        if (seen[w]) continue;
        seen[w] = true;
        parent[w] = u;
        if (pebbles[w] > 0) {
          --pebbles[w];
          ++pebbles[root];
          for (Index x = w; x != root; x = parent[x]) {
            const Index p = parent[x];
            auto& arcs = out[p];
            arcs.erase(std::find(arcs.begin(), arcs.end(), x));
            out[x].push_back(p);
          }
          return true;
        }
        stack.push_back(w);
      }
    }
    return false;
  };

  Index independent = 0;
  for (const auto& [u, v] : graph.edges()) {
    while (pebbles[u] + pebbles[v] < 4) {
      if (pebbles[u] < 2 && fetch(u, v)) continue;
      if (pebbles[v] < 2 && fetch(v, u)) continue;
      break;
    }
    if (pebbles[u] + pebbles[v] < 4) continue;
    --pebbles[u];
    out[u].push_back(v);
    ++independent;
  }
  return independent;
}

bool laman_check_2d(const SimpleGraph& graph) {
  const Index n = graph.vertex_count();
  if (n <= 1) return true;
  return pebble_game_rank_2d(graph) == 2 * n - 3;
}

bool laman_check_2d(const AnchorGraph& graph) {
  if (graph.k != 2) throw InvalidInput("laman_check_2d requires k = 2");
  return laman_check_2d(SimpleGraph::from_anchor_graph(graph));
}

}  // namespace nsmds
