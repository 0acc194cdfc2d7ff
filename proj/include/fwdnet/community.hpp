#pragma once

#include "fwdnet/graph.hpp"

#include <span>
#include <vector>

namespace fwdnet {

/// Community labels are dense (0..community_count-1), assigned by first
/// occurrence in node id order, so equal partitions compare equal.
struct Partition {
    std::vector<std::uint32_t> assignment; // indexed by NodeId
    std::uint32_t community_count = 0;
    double modularity = 0.0;
};

/// Weighted undirected modularity on the undirected projection of the graph
/// (opposite directed edges merge; a self-loop of weight w counts once in the
/// total weight and contributes 2w to its node's degree):
///   Q = sum_c [ in_c/(2m) - resolution * (tot_c/(2m))^2 ]
/// Throws Error{InvalidArgument} when the assignment does not cover every node.
double modularity(const ForwardGraph& graph, std::span<const std::uint32_t> assignment,
                  double resolution = 1.0);

/// Two-phase Louvain: seed-shuffled local moving to the neighbor community
/// with maximal gain (ties resolve to the lowest community index), then
/// aggregation, iterated until no gain above 1e-9; a final local-moving pass
/// over the original graph leaves no profitable single-node move. The
/// returned modularity equals modularity(graph, assignment, resolution).
/// Throws Error{InvalidArgument} on an empty graph.
Partition louvain(const ForwardGraph& graph, double resolution = 1.0, std::uint64_t seed = 0);

} // namespace fwdnet
