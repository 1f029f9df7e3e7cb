#include "timelinekit/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace timelinekit {

namespace {
constexpr double kEps = 1e-11;  // residuals below this are considered saturated
}

FlowNetwork::FlowNetwork() {
    head_.assign(2, -1);  // source, sink
}

int FlowNetwork::add_node() {
    head_.push_back(-1);
    return static_cast<int>(head_.size()) - 1;
}

int FlowNetwork::add_nodes(int count) {
    int first = static_cast<int>(head_.size());
    head_.resize(head_.size() + static_cast<size_t>(count), -1);
    return first;
}

void FlowNetwork::reserve(int nodes, int arcs) {
    head_.reserve(static_cast<size_t>(nodes) + 2);
    arcs_.reserve(static_cast<size_t>(arcs) * 2);
}

void FlowNetwork::add_edge(int u, int v, double cap, double rev_cap) {
    if (u < 0 || v < 0 || u >= num_nodes() || v >= num_nodes())
        throw std::out_of_range("flow network node index");
    if (cap < 0.0 || rev_cap < 0.0) throw std::invalid_argument("negative capacity");
    arcs_.push_back({v, head_[static_cast<size_t>(u)], cap, cap});
    head_[static_cast<size_t>(u)] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({u, head_[static_cast<size_t>(v)], rev_cap, rev_cap});
    head_[static_cast<size_t>(v)] = static_cast<int>(arcs_.size()) - 1;
    solved_ = false;
}

void FlowNetwork::add_terminal(int v, double cap_from_source, double cap_to_sink) {
    if (cap_from_source > 0.0) add_edge(kSource, v, cap_from_source);
    if (cap_to_sink > 0.0) add_edge(v, kSink, cap_to_sink);
}

bool FlowNetwork::bfs_levels() {
    level_.assign(head_.size(), -1);
    std::deque<int> queue;
    level_[kSource] = 0;
    queue.push_back(kSource);
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int a = head_[static_cast<size_t>(u)]; a != -1; a = arcs_[static_cast<size_t>(a)].next) {
            const Arc& arc = arcs_[static_cast<size_t>(a)];
            if (arc.cap > kEps && level_[static_cast<size_t>(arc.to)] < 0) {
                level_[static_cast<size_t>(arc.to)] = level_[static_cast<size_t>(u)] + 1;
                queue.push_back(arc.to);
            }
        }
    }
    return level_[kSink] >= 0;
}

double FlowNetwork::dfs_push(int v, double limit) {
    if (v == kSink || limit <= kEps) return limit;
    double pushed = 0.0;
    for (int& a = iter_[static_cast<size_t>(v)]; a != -1; a = arcs_[static_cast<size_t>(a)].next) {
        Arc& arc = arcs_[static_cast<size_t>(a)];
        if (arc.cap > kEps && level_[static_cast<size_t>(arc.to)] == level_[static_cast<size_t>(v)] + 1) {
            double got = dfs_push(arc.to, std::min(limit - pushed, arc.cap));
            if (got > kEps) {
                arc.cap -= got;
                arcs_[static_cast<size_t>(a ^ 1)].cap += got;
                pushed += got;
                if (pushed >= limit - kEps) return pushed;
            }
        }
    }
    level_[static_cast<size_t>(v)] = -1;  // dead end for this phase
    return pushed;
}

double FlowNetwork::solve() {
    flow_ = 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    while (bfs_levels()) {
        iter_ = head_;
        double got;
        while ((got = dfs_push(kSource, inf)) > kEps) flow_ += got;
    }
    // Residual reachability from the source defines the min cut.
    reach_.assign(head_.size(), 0);
    std::deque<int> queue;
    reach_[kSource] = 1;
    queue.push_back(kSource);
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int a = head_[static_cast<size_t>(u)]; a != -1; a = arcs_[static_cast<size_t>(a)].next) {
            const Arc& arc = arcs_[static_cast<size_t>(a)];
            if (arc.cap > kEps && !reach_[static_cast<size_t>(arc.to)]) {
                reach_[static_cast<size_t>(arc.to)] = 1;
                queue.push_back(arc.to);
            }
        }
    }
    solved_ = true;
    double cut = cut_capacity();
    double tol = 1e-6 * std::max(1.0, std::abs(flow_));
    if (std::abs(cut - flow_) > tol)
        throw std::logic_error("max-flow/min-cut duality violated");
    return flow_;
}

double FlowNetwork::cut_capacity() const {
    if (!solved_) throw std::logic_error("cut_capacity before solve");
    double cut = 0.0;
    for (size_t u = 0; u < head_.size(); ++u) {
        if (!reach_[u]) continue;
        for (int a = head_[u]; a != -1; a = arcs_[static_cast<size_t>(a)].next) {
            const Arc& arc = arcs_[static_cast<size_t>(a)];
            if (!reach_[static_cast<size_t>(arc.to)]) cut += arc.orig;
        }
    }
    return cut;
}

}  // namespace timelinekit
