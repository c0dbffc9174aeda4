#pragma once

#include <cstdint>
#include <vector>

namespace relfeat {

/// Exact max-flow / min-cut on a directed graph (Dinic's algorithm).
/// Exactness matters: the segmentation's energy-monotonicity argument
/// assumes optimal cuts.
class MaxFlowGraph {
 public:
  explicit MaxFlowGraph(int node_count);

  int source() const { return source_; }
  int sink() const { return sink_; }

  /// Directed edge u -> v with the given capacity plus a reverse edge.
  void add_edge(int u, int v, double cap, double rev_cap = 0.0);

  /// Terminal capacities: source -> node and node -> sink.
  void add_terminal(int node, double cap_from_source, double cap_to_sink);

  double solve();

  /// After solve(): nodes reachable from the source in the residual graph.
  bool on_source_side(int node) const { return reachable_[static_cast<std::size_t>(node)]; }

 private:
  struct Edge {
    int to;
    double cap;
    std::size_t rev;
  };

  bool bfs_levels();
  double dfs_push(int node, double limit);

  int n_;
  int source_;
  int sink_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
  std::vector<bool> reachable_;
};

}  // namespace relfeat
