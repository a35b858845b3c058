#pragma once

#include <optional>
#include <string>
#include <vector>

namespace campl {

/// Process network: processes and services are nodes, channels are edges.
class Topology {
 public:
  struct Edge {
    int channel;
    long a;
    long b;
  };

  /// Services use negative node ids so they never clash with pids.
  static long service_node(int index) { return -1 - index; }

  void add_node(long node);
  void add_edge(int channel, long a, long b);

  const std::vector<long>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Channels forming a cycle, or nothing when the graph is a forest.
  /// Two parallel edges between the same nodes count as a cycle.
  std::optional<std::vector<Edge>> find_cycle() const;

 private:
  std::vector<long> nodes_;
  std::vector<Edge> edges_;
};

}  // namespace campl
