#pragma once

#include <cstdint>
#include <vector>

namespace timelinekit {

// s-t max-flow / min-cut on a directed graph with real capacities (Dinic's
// algorithm). Node 0 is the source, node 1 the sink; add_node() hands out
// 2, 3, ... After solve(), source_side() reports the min-cut partition
// (residual-reachable from the source) and cut_capacity() the capacity of
// that cut under the original capacities. solve() verifies strong duality
// (max-flow == min-cut within tolerance) and throws if it does not hold.
class FlowNetwork {
  public:
    FlowNetwork();

    static constexpr int kSource = 0;
    static constexpr int kSink = 1;

    int add_node();
    int add_nodes(int count);  // returns index of the first
    int num_nodes() const { return static_cast<int>(head_.size()); }

    // Directed edge u->v with capacity cap; the paired reverse arc gets
    // rev_cap (use rev_cap == cap for an undirected edge).
    void add_edge(int u, int v, double cap, double rev_cap = 0.0);

    // Shorthand for the two terminal arcs of node `v`.
    void add_terminal(int v, double cap_from_source, double cap_to_sink);

    void reserve(int nodes, int arcs);

    double solve();
    bool solved() const { return solved_; }
    bool source_side(int v) const { return reach_[static_cast<size_t>(v)] != 0; }
    double max_flow() const { return flow_; }
    double cut_capacity() const;

  private:
    struct Arc {
        int to;
        int next;  // next arc index in the adjacency list, -1 terminates
        double cap;
        double orig;
    };

    bool bfs_levels();
    double dfs_push(int v, double limit);

    std::vector<Arc> arcs_;
    std::vector<int> head_;
    std::vector<int> level_;
    std::vector<int> iter_;
    std::vector<std::uint8_t> reach_;
    double flow_ = 0.0;
    bool solved_ = false;
};

}  // namespace timelinekit
