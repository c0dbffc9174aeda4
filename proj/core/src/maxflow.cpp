#include "relfeat/maxflow.hpp"

#include <deque>
#include <limits>

namespace relfeat {

MaxFlowGraph::MaxFlowGraph(int node_count)
    : n_(node_count + 2), source_(node_count), sink_(node_count + 1), adj_(n_) {}

void MaxFlowGraph::add_edge(int u, int v, double cap, double rev_cap) {
  adj_[u].push_back({v, cap, adj_[v].size()});
  adj_[v].push_back({u, rev_cap, adj_[u].size() - 1});
}

void MaxFlowGraph::add_terminal(int node, double cap_from_source, double cap_to_sink) {
  if (cap_from_source > 0.0) add_edge(source_, node, cap_from_source);
  if (cap_to_sink > 0.0) add_edge(node, sink_, cap_to_sink);
}

bool MaxFlowGraph::bfs_levels() {
  level_.assign(n_, -1);
  std::deque<int> queue;
  level_[source_] = 0;
  queue.push_back(source_);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Edge& e : adj_[u]) {
      if (e.cap > 1e-12 && level_[e.to] < 0) {
        level_[e.to] = level_[u] + 1;
        queue.push_back(e.to);
      }
    }
  }
  return level_[sink_] >= 0;
}

double MaxFlowGraph::dfs_push(int node, double limit) {
  if (node == sink_) return limit;
  for (std::size_t& i = iter_[node]; i < adj_[node].size(); ++i) {
    Edge& e = adj_[node][i];
    if (e.cap > 1e-12 && level_[e.to] == level_[node] + 1) {
      const double pushed = dfs_push(e.to, std::min(limit, e.cap));
      if (pushed > 0.0) {
        e.cap -= pushed;
        adj_[e.to][e.rev].cap += pushed;
        return pushed;
      }
    }
  }
  return 0.0;
}

double MaxFlowGraph::solve() {
  double flow = 0.0;
  while (bfs_levels()) {
    iter_.assign(n_, 0);
    for (;;) {
      const double pushed = dfs_push(source_, std::numeric_limits<double>::infinity());
      if (pushed <= 0.0) break;
      flow += pushed;
    }
  }
  reachable_.assign(n_, false);
  std::deque<int> queue;
  reachable_[source_] = true;
  queue.push_back(source_);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Edge& e : adj_[u]) {
      if (e.cap > 1e-12 && !reachable_[e.to]) {
        reachable_[e.to] = true;
        queue.push_back(e.to);
      }
    }
  }
  return flow;
}

}  // namespace relfeat
