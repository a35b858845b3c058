#include "campl/topology.hpp"

#include <algorithm>
#include <map>

namespace campl {

void Topology::add_node(long node) {
  if (std::find(nodes_.begin(), nodes_.end(), node) == nodes_.end()) nodes_.push_back(node);
}

void Topology::add_edge(int channel, long a, long b) {
  add_node(a);
  add_node(b);
  edges_.push_back({channel, a, b});
}

std::optional<std::vector<Topology::Edge>> Topology::find_cycle() const {
  std::map<long, std::vector<std::size_t>> adjacent;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    adjacent[edges_[i].a].push_back(i);
    adjacent[edges_[i].b].push_back(i);
  }
  std::map<long, int> state;  // 0 unseen, 1 on path, 2 done
  std::vector<std::size_t> path;

  // Iterative DFS that remembers the edge used to enter each node.
  struct Frame {
    long node;
    std::size_t via;
    std::size_t next;
  };
  for (long root : nodes_) {
    if (state[root]) continue;
    std::vector<Frame> stack{{root, edges_.size(), 0}};
    state[root] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& out = adjacent[f.node];
      if (f.next == out.size()) {
        state[f.node] = 2;
        stack.pop_back();
        continue;
      }
      std::size_t e = out[f.next++];
      if (e == f.via) continue;
      const Edge& edge = edges_[e];
      long other = edge.a == f.node ? edge.b : edge.a;
      if (state[other] == 1) {
        std::vector<Edge> cycle{edge};
        for (auto it = stack.rbegin(); it != stack.rend() && it->node != other; ++it)
          cycle.push_back(edges_[it->via]);
        return cycle;
      }
      if (state[other] == 0) {
        state[other] = 1;
        stack.push_back({other, e, 0});
      }
    }
  }
  return std::nullopt;
}

}  // namespace campl
