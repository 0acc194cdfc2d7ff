#pragma once

#include "fwdnet/graph.hpp"

#include <span>
#include <vector>

namespace fwdnet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

/// Spring-electrical layout parameters. The virtual layout area is fixed at
/// 1e6 square units; the optimal edge length is
/// optimal_distance_scale * sqrt(area / node_count).
struct LayoutParams {
    double optimal_distance_scale = 1.0;
    double relative_strength = 0.2; // repulsion coefficient
    double initial_step = 100.0;    // 10% of the layout area side
    double step_ratio = 0.95;
    double barnes_hut_theta = 1.2;
    double convergence_tolerance = 1e-4; // relative energy change
    std::uint32_t max_iterations = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Layout {
    std::vector<Vec2> coordinates; // indexed by NodeId
    std::uint32_t iterations_used = 0;
    double initial_energy = 0.0;
    double final_energy = 0.0;
};

/// Force-directed layout on the undirected projection: attraction d^2/K along
/// edges, Barnes-Hut-approximated repulsion C*K^2/d between all pairs, with
/// an adaptive step schedule (grow after five consecutive energy drops,
/// shrink by step_ratio on any increase). Deterministic for a fixed seed.
/// Throws Error{InvalidArgument} on an empty graph.
Layout yifan_hu(const ForwardGraph& graph, const LayoutParams& params = {});

/// Total repulsive force on `query` from `points`, approximated by a
/// quadtree: a cell acts as one supernode at its center of mass when its
/// size over the distance stays below theta (size measured by the cell
/// diagonal, distance discounted by the center-of-mass offset). Each point
/// contributes repulsion * (query - p) / d^2 (magnitude repulsion / d);
/// coincident points are skipped. theta = 0 degenerates to the exact
/// pairwise sum.
Vec2 quadtree_force(std::span<const Vec2> points, Vec2 query, double theta, double repulsion);

} // namespace fwdnet
