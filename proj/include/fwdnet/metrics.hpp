#pragma once

#include "fwdnet/graph.hpp"

#include <vector>

namespace fwdnet {

/// Directed, unweighted, unnormalized betweenness centrality (Brandes).
/// Shortest paths are hop counts; edge weights are ignored and self-loops
/// never lie on a shortest path. Sources are processed in fixed-size blocks
/// whose partial sums merge in block order, so the result is bit-identical
/// regardless of thread count. thread_count 0 picks the hardware default.
std::vector<double> betweenness(const ForwardGraph& graph, unsigned thread_count = 0);

struct GraphStats {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    Weight total_weight = 0;

    bool operator==(const GraphStats&) const = default;
};

struct MetricsTable {
    std::vector<NodeMetrics> rows; // indexed by NodeId
    GraphStats stats;
};

/// Degrees plus betweenness in one table.
MetricsTable metrics_table(const ForwardGraph& graph, unsigned thread_count = 0);

} // namespace fwdnet
