#include <doctest.h>

#include <limits>
#include <tuple>
#include <vector>

#include "timelinekit/maxflow.hpp"
#include "timelinekit/rng.hpp"

using namespace timelinekit;

namespace {

// Brute-force min-cut oracle: enumerate every source-side subset of the
// non-terminal nodes and charge the capacity of arcs crossing into the sink
// side. Arcs are recorded as (u, v, cap) exactly as handed to the network.
double brute_min_cut(int n_internal, const std::vector<std::tuple<int, int, double>>& arcs) {
    double best = std::numeric_limits<double>::infinity();
    for (int bits = 0; bits < (1 << n_internal); ++bits) {
        auto source_side = [&](int v) {
            if (v == FlowNetwork::kSource) return true;
            if (v == FlowNetwork::kSink) return false;
            return (bits >> (v - 2)) & 1;
        };
        double cut = 0;
        for (const auto& [u, v, cap] : arcs)
            if (source_side(u) && !source_side(v)) cut += cap;
        best = std::min(best, cut);
    }
    return best;
}

}  // namespace

TEST_SUITE("maxflow") {

TEST_CASE("single node bottlenecked by its sink arc") {
    FlowNetwork net;
    int a = net.add_node();
    net.add_terminal(a, 5.0, 3.0);
    CHECK(net.solve() == doctest::Approx(3.0));
    CHECK(net.source_side(FlowNetwork::kSource));
    CHECK_FALSE(net.source_side(FlowNetwork::kSink));
    CHECK(net.source_side(a));  // residual from source remains (5 > 3)
    CHECK(net.cut_capacity() == doctest::Approx(3.0));
}

TEST_CASE("two-node chain cuts the middle edge") {
    FlowNetwork net;
    int a = net.add_node();
    int b = net.add_node();
    net.add_terminal(a, 4.0, 0.0);
    net.add_terminal(b, 0.0, 5.0);
    net.add_edge(a, b, 2.0);
    CHECK(net.solve() == doctest::Approx(2.0));
    CHECK(net.source_side(a));
    CHECK_FALSE(net.source_side(b));
}

TEST_CASE("diamond with a cross edge") {
    FlowNetwork net;
    int a = net.add_node();
    int b = net.add_node();
    net.add_terminal(a, 3.0, 0.0);
    net.add_terminal(b, 2.0, 0.0);
    net.add_edge(a, FlowNetwork::kSink, 0.0);  // exercised as plain arcs too
    net.add_terminal(a, 0.0, 2.0);
    net.add_terminal(b, 0.0, 3.0);
    net.add_edge(a, b, 1.0);
    CHECK(net.solve() == doctest::Approx(5.0));
}

TEST_CASE("bipartite matching as flow") {
    FlowNetwork net;
    int first = net.add_nodes(6);  // 3 left, 3 right
    for (int i = 0; i < 3; ++i) net.add_terminal(first + i, 1.0, 0.0);
    for (int j = 0; j < 3; ++j) net.add_terminal(first + 3 + j, 0.0, 1.0);
    // Perfect matching exists: i -> i and i -> (i+1)%3.
    for (int i = 0; i < 3; ++i) {
        net.add_edge(first + i, first + 3 + i, 1.0);
        net.add_edge(first + i, first + 3 + (i + 1) % 3, 1.0);
    }
    CHECK(net.solve() == doctest::Approx(3.0));
}

TEST_CASE("solver equals exhaustive min-cut on random graphs") {
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        int n = rng.uniform_int(1, 8);
        FlowNetwork net;
        net.add_nodes(n);
        std::vector<std::tuple<int, int, double>> arcs;
        for (int v = 2; v < 2 + n; ++v) {
            double sc = rng.uniform_int(0, 10);
            double tc = rng.uniform_int(0, 10);
            net.add_terminal(v, sc, tc);
            if (sc > 0) arcs.emplace_back(FlowNetwork::kSource, v, sc);
            if (tc > 0) arcs.emplace_back(v, FlowNetwork::kSink, tc);
        }
        for (int u = 2; u < 2 + n; ++u)
            for (int v = 2; v < 2 + n; ++v) {
                if (u == v || !rng.chance(0.3)) continue;
                double cap = rng.uniform_int(0, 10);
                double rev = rng.chance(0.5) ? rng.uniform_int(0, 10) : 0;
                net.add_edge(u, v, cap, rev);
                if (cap > 0) arcs.emplace_back(u, v, cap);
                if (rev > 0) arcs.emplace_back(v, u, rev);
            }
        double flow = net.solve();
        double oracle = brute_min_cut(n, arcs);
        CHECK(flow == doctest::Approx(oracle).epsilon(1e-9));
        // The reported partition's crossing capacity must equal the flow.
        double crossing = 0;
        for (const auto& [u, v, cap] : arcs)
            if (net.source_side(u) && !net.source_side(v)) crossing += cap;
        CHECK(crossing == doctest::Approx(flow).epsilon(1e-9));
        CHECK(net.cut_capacity() == doctest::Approx(flow).epsilon(1e-9));
    }
}

}  // TEST_SUITE
