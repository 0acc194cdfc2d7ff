#pragma once

#include "fwdnet/community.hpp"
#include "fwdnet/graph.hpp"

#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <vector>

namespace fwdnet::test {

/// Betweenness by explicit enumeration of every shortest directed path,
/// independent of the dependency-accumulation implementation.
inline std::vector<double> brute_force_betweenness(const ForwardGraph& graph) {
    const std::size_t n = graph.node_count();
    std::vector<double> centrality(n, 0.0);
    constexpr auto kUnreached = std::numeric_limits<std::uint32_t>::max();

    for (NodeId s = 0; s < n; ++s) {
        std::vector<std::uint32_t> dist(n, kUnreached);
        dist[s] = 0;
        std::queue<NodeId> frontier;
        frontier.push(s);
        while (!frontier.empty()) {
            NodeId v = frontier.front();
            frontier.pop();
            for (const Arc& arc : graph.out_arcs(v)) {
                if (arc.node == v) continue;
                if (dist[arc.node] == kUnreached) {
                    dist[arc.node] = dist[v] + 1;
                    frontier.push(arc.node);
                }
            }
        }
        for (NodeId t = 0; t < n; ++t) {
            if (t == s || dist[t] == kUnreached || dist[t] < 2) continue;
            // enumerate every shortest s->t path
            std::vector<double> interior(n, 0.0);
            double sigma = 0.0;
            std::vector<NodeId> path{s};
            auto dfs = [&](auto&& self, NodeId v) -> void {
                if (v == t) {
                    sigma += 1.0;
                    for (std::size_t i = 1; i + 1 < path.size(); ++i) interior[path[i]] += 1.0;
                    return;
                }
                for (const Arc& arc : graph.out_arcs(v)) {
                    if (arc.node == v) continue;
                    if (dist[arc.node] == dist[v] + 1 && dist[arc.node] <= dist[t]) {
                        path.push_back(arc.node);
                        self(self, arc.node);
                        path.pop_back();
                    }
                }
            };
            dfs(dfs, s);
            for (NodeId v = 0; v < n; ++v)
                if (interior[v] > 0.0) centrality[v] += interior[v] / sigma;
        }
    }
    return centrality;
}

/// Modularity straight from the definition: Kahan-summed double loop over
/// ordered node pairs of the undirected projection's adjacency matrix.
inline double modularity_oracle(const ForwardGraph& graph,
                                std::span<const std::uint32_t> assignment, double resolution) {
    const std::size_t n = graph.node_count();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (const Edge& edge : graph.edges()) {
        if (edge.source == edge.target) {
            a[edge.source][edge.source] += 2.0 * static_cast<double>(edge.weight);
        } else {
            a[edge.source][edge.target] += static_cast<double>(edge.weight);
            a[edge.target][edge.source] += static_cast<double>(edge.weight);
        }
    }
    std::vector<double> k(n, 0.0);
    double m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) k[i] += a[i][j];
        m2 += k[i];
    }
    if (m2 <= 0.0) return 0.0;
    double q = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (assignment[i] != assignment[j]) continue;
            const double term = a[i][j] / m2 - resolution * (k[i] / m2) * (k[j] / m2);
            const double y = term - carry;
            const double t = q + y;
            carry = (t - q) - y;
            q = t;
        }
    }
    return q;
}

/// Best single-node move gain found by re-evaluating modularity() on the
/// mutated assignment, scanning every node against every adjacent community.
inline double best_single_move_gain(const ForwardGraph& graph,
                                    std::span<const std::uint32_t> assignment,
                                    double resolution) {
    const std::size_t n = graph.node_count();
    std::vector<std::uint32_t> mutated(assignment.begin(), assignment.end());
    const double base = modularity(graph, mutated, resolution);
    double best = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        std::set<std::uint32_t> candidates;
        for (const Arc& arc : graph.out_arcs(v))
            if (arc.node != v) candidates.insert(assignment[arc.node]);
        for (const Arc& arc : graph.in_arcs(v))
            if (arc.node != v) candidates.insert(assignment[arc.node]);
        candidates.erase(assignment[v]);
        for (std::uint32_t c : candidates) {
            mutated[v] = c;
            best = std::max(best, modularity(graph, mutated, resolution) - base);
        }
        mutated[v] = assignment[v];
    }
    return best;
}

/// Degree recount from scratch with neighbor sets, independent of the
/// adjacency bookkeeping in degrees().
inline std::vector<NodeMetrics> recount_degrees(const ForwardGraph& graph) {
    const std::size_t n = graph.node_count();
    std::vector<std::set<NodeId>> in_neighbors(n), out_neighbors(n);
    std::vector<NodeMetrics> metrics(n);
    for (const Edge& edge : graph.edges()) {
        out_neighbors[edge.source].insert(edge.target);
        in_neighbors[edge.target].insert(edge.source);
        metrics[edge.source].weighted_out += edge.weight;
        metrics[edge.target].weighted_in += edge.weight;
    }
    for (std::size_t i = 0; i < n; ++i) {
        metrics[i].in_degree = static_cast<std::uint32_t>(in_neighbors[i].size());
        metrics[i].out_degree = static_cast<std::uint32_t>(out_neighbors[i].size());
        metrics[i].frequency = metrics[i].weighted_in + metrics[i].weighted_out;
    }
    return metrics;
}

} // namespace fwdnet::test
