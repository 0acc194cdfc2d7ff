#include "fwdnet/community.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

namespace fwdnet {

namespace {

constexpr double kMinGain = 1e-9;

// Undirected projection. adj holds each inter-node edge twice (once per
// endpoint); self-loop weight is kept separately, counted once.
struct UndirectedView {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
    std::vector<double> loop;
    std::vector<double> degree; // sum of adj weights + 2 * loop
    double total_degree = 0.0;  // == 2m

    std::size_t size() const { return adj.size(); }
};

UndirectedView project(const ForwardGraph& graph) {
    UndirectedView view;
    const std::size_t n = graph.node_count();
    view.adj.resize(n);
    view.loop.assign(n, 0.0);
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> merged;
    for (const Edge& edge : graph.edges()) {
        if (edge.source == edge.target) {
            view.loop[edge.source] += static_cast<double>(edge.weight);
        } else {
            const std::uint32_t lo = std::min(edge.source, edge.target);
            const std::uint32_t hi = std::max(edge.source, edge.target);
            merged[{lo, hi}] += static_cast<double>(edge.weight);
        }
    }
    for (const auto& [pair, weight] : merged) {
        view.adj[pair.first].emplace_back(pair.second, weight);
        view.adj[pair.second].emplace_back(pair.first, weight);
    }
    for (auto& arcs : view.adj)
        std::sort(arcs.begin(), arcs.end());
    view.degree.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double k = 2.0 * view.loop[i];
        for (const auto& [_, w] : view.adj[i]) k += w;
        view.degree[i] = k;
        view.total_degree += k;
    }
    return view;
}

// One Louvain local-moving phase. Starts from `assignment` (labels < n),
// repeats passes over the seed-shuffled node order until a pass gains less
// than kMinGain. Returns the accumulated modularity gain.
double local_moving(const UndirectedView& view, std::vector<std::uint32_t>& assignment,
                    double resolution, std::mt19937_64& rng) {
    const std::size_t n = view.size();
    const double m2 = view.total_degree;
    if (m2 <= 0.0) return 0.0;

    std::vector<double> tot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) tot[assignment[i]] += view.degree[i];

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> weight_to(n, 0.0);
    std::vector<std::uint32_t> touched;
    touched.reserve(16);

    double total_gain = 0.0;
    for (;;) {
        double pass_gain = 0.0;
        for (std::uint32_t i : order) {
            const std::uint32_t old_comm = assignment[i];
            touched.clear();
            for (const auto& [j, w] : view.adj[i]) {
                std::uint32_t c = assignment[j];
                if (weight_to[c] == 0.0) touched.push_back(c);
                weight_to[c] += w;
            }
            tot[old_comm] -= view.degree[i];

            auto gain_of = [&](std::uint32_t c) {
                return weight_to[c] - resolution * tot[c] * view.degree[i] / m2;
            };
            const double old_gain = gain_of(old_comm);
            std::uint32_t best = old_comm;
            double best_gain = old_gain;
            for (std::uint32_t c : touched) {
                if (c == old_comm) continue;
                double gain = gain_of(c);
                // only strictly improving moves; equal-gain candidates
                // resolve to the lowest community index
                if (gain > best_gain) {
                    best = c;
                    best_gain = gain;
                } else if (gain == best_gain && best != old_comm && c < best) {
                    best = c;
                }
            }
            tot[best] += view.degree[i];
            assignment[i] = best;
            if (best != old_comm) pass_gain += 2.0 * (best_gain - old_gain) / m2;

            for (std::uint32_t c : touched) weight_to[c] = 0.0;
        }
        total_gain += pass_gain;
        if (pass_gain < kMinGain) break;
    }
    return total_gain;
}

// True when some node could move to a neighboring community with modularity
// gain above kMinGain.
bool has_profitable_move(const UndirectedView& view, std::span<const std::uint32_t> assignment,
                         double resolution) {
    const std::size_t n = view.size();
    const double m2 = view.total_degree;
    if (m2 <= 0.0) return false;
    std::vector<double> tot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) tot[assignment[i]] += view.degree[i];
    std::vector<double> weight_to(n, 0.0);
    std::vector<std::uint32_t> touched;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t old_comm = assignment[i];
        touched.clear();
        for (const auto& [j, w] : view.adj[i]) {
            std::uint32_t c = assignment[j];
            if (weight_to[c] == 0.0) touched.push_back(c);
            weight_to[c] += w;
        }
        tot[old_comm] -= view.degree[i];
        auto gain_of = [&](std::uint32_t c) {
            return weight_to[c] - resolution * tot[c] * view.degree[i] / m2;
        };
        const double old_gain = gain_of(old_comm);
        bool found = false;
        for (std::uint32_t c : touched) {
            if (c != old_comm && 2.0 * (gain_of(c) - old_gain) / m2 > kMinGain) {
                found = true;
                break;
            }
        }
        tot[old_comm] += view.degree[i];
        for (std::uint32_t c : touched) weight_to[c] = 0.0;
        if (found) return true;
    }
    return false;
}

std::uint32_t relabel_dense(std::vector<std::uint32_t>& assignment) {
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    std::uint32_t next = 0;
    for (std::uint32_t& label : assignment) {
        auto [it, inserted] = remap.emplace(label, next);
        if (inserted) ++next;
        label = it->second;
    }
    return next;
}

UndirectedView aggregate(const UndirectedView& view, std::span<const std::uint32_t> assignment,
                         std::uint32_t community_count) {
    UndirectedView coarse;
    coarse.adj.resize(community_count);
    coarse.loop.assign(community_count, 0.0);
    std::vector<std::map<std::uint32_t, double>> external(community_count);
    for (std::size_t u = 0; u < view.size(); ++u) {
        const std::uint32_t cu = assignment[u];
        coarse.loop[cu] += view.loop[u];
        for (const auto& [v, w] : view.adj[u]) {
            const std::uint32_t cv = assignment[v];
            if (cu == cv) {
                coarse.loop[cu] += w / 2.0; // both endpoints contribute w/2
            } else {
                external[cu][cv] += w;
            }
        }
    }
    for (std::uint32_t c = 0; c < community_count; ++c) {
        coarse.adj[c].assign(external[c].begin(), external[c].end());
    }
    coarse.degree.assign(community_count, 0.0);
    for (std::uint32_t c = 0; c < community_count; ++c) {
        double k = 2.0 * coarse.loop[c];
        for (const auto& [_, w] : coarse.adj[c]) k += w;
        coarse.degree[c] = k;
        coarse.total_degree += k;
    }
    return coarse;
}

} // namespace

double modularity(const ForwardGraph& graph, std::span<const std::uint32_t> assignment,
                  double resolution) {
    if (assignment.size() != graph.node_count())
        throw Error(ErrorKind::InvalidArgument, "assignment does not cover every node");
    UndirectedView view = project(graph);
    const double m2 = view.total_degree;
    if (m2 <= 0.0) return 0.0;

    std::unordered_map<std::uint32_t, std::size_t> slot;
    std::vector<double> in_c, tot_c;
    auto slot_of = [&](std::uint32_t label) {
        auto [it, inserted] = slot.emplace(label, in_c.size());
        if (inserted) {
            in_c.push_back(0.0);
            tot_c.push_back(0.0);
        }
        return it->second;
    };
    for (std::size_t i = 0; i < view.size(); ++i) {
        std::size_t s = slot_of(assignment[i]);
        tot_c[s] += view.degree[i];
        in_c[s] += 2.0 * view.loop[i];
        for (const auto& [j, w] : view.adj[i]) {
            if (assignment[j] == assignment[i]) in_c[s] += w;
        }
    }
    double q = 0.0;
    for (std::size_t s = 0; s < in_c.size(); ++s) {
        const double tot_frac = tot_c[s] / m2;
        q += in_c[s] / m2 - resolution * tot_frac * tot_frac;
    }
    return q;
}

Partition louvain(const ForwardGraph& graph, double resolution, std::uint64_t seed) {
    if (graph.node_count() == 0)
        throw Error(ErrorKind::InvalidArgument, "cannot detect communities in an empty graph");

    const std::size_t n = graph.node_count();
    UndirectedView original = project(graph);
    std::mt19937_64 rng(seed);

    std::vector<std::uint32_t> flat(n);
    std::iota(flat.begin(), flat.end(), 0);

    UndirectedView level = original;
    for (;;) {
        std::vector<std::uint32_t> assignment(level.size());
        std::iota(assignment.begin(), assignment.end(), 0);
        double gain = local_moving(level, assignment, resolution, rng);
        std::uint32_t count = relabel_dense(assignment);
        if (gain < kMinGain || count == level.size()) break;
        for (std::uint32_t& label : flat) label = assignment[label];
        level = aggregate(level, assignment, count);
    }

    // polish on the original graph until no single-node move stays profitable
    relabel_dense(flat);
    for (int round = 0; round < 100; ++round) {
        local_moving(original, flat, resolution, rng);
        if (!has_profitable_move(original, flat, resolution)) break;
    }

    Partition partition;
    partition.assignment = std::move(flat);
    partition.community_count = relabel_dense(partition.assignment);
    partition.modularity = modularity(graph, partition.assignment, resolution);
    return partition;
}

} // namespace fwdnet
