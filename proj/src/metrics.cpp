#include "fwdnet/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>

namespace fwdnet {

namespace {

constexpr std::size_t kSourceBlock = 256;

// Accumulates dependencies for sources [begin, end) into `partial`.
void brandes_block(const ForwardGraph& graph, NodeId begin, NodeId end,
                   std::vector<double>& partial) {
    const std::size_t n = graph.node_count();
    partial.assign(n, 0.0);

    std::vector<std::uint32_t> dist(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<NodeId> order;
    std::vector<std::vector<NodeId>> preds(n);
    std::vector<NodeId> queue(n);
    order.reserve(n);

    for (NodeId s = begin; s < end; ++s) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
        std::fill(sigma.begin(), sigma.end(), 0.0);
        order.clear();
        for (auto& p : preds) p.clear();

        dist[s] = 0;
        sigma[s] = 1.0;
        std::size_t head = 0, tail = 0;
        queue[tail++] = s;
        while (head < tail) {
            NodeId v = queue[head++];
            order.push_back(v);
            for (const Arc& arc : graph.out_arcs(v)) {
                NodeId w = arc.node;
                if (w == v) continue; // self-loop
                if (dist[w] == std::numeric_limits<std::uint32_t>::max()) {
                    dist[w] = dist[v] + 1;
                    queue[tail++] = w;
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }

        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            NodeId w = *it;
            for (NodeId v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) partial[w] += delta[w];
        }
    }
}

} // namespace

std::vector<double> betweenness(const ForwardGraph& graph, unsigned thread_count) {
    const std::size_t n = graph.node_count();
    std::vector<double> centrality(n, 0.0);
    if (n == 0) return centrality;

    const std::size_t block_count = (n + kSourceBlock - 1) / kSourceBlock;
    std::vector<std::vector<double>> partials(block_count);

    unsigned workers = thread_count != 0 ? thread_count : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, block_count));

    std::atomic<std::size_t> next_block{0};
    auto run = [&]() {
        for (;;) {
            std::size_t b = next_block.fetch_add(1);
            if (b >= block_count) return;
            NodeId begin = static_cast<NodeId>(b * kSourceBlock);
            NodeId end = static_cast<NodeId>(std::min(n, (b + 1) * kSourceBlock));
            brandes_block(graph, begin, end, partials[b]);
        }
    };

    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) threads.emplace_back(run);
        for (auto& t : threads) t.join();
    }

    // fixed merge order keeps the floating-point sum deterministic
    for (std::size_t b = 0; b < block_count; ++b)
        for (std::size_t v = 0; v < n; ++v) centrality[v] += partials[b][v];
    return centrality;
}

MetricsTable metrics_table(const ForwardGraph& graph, unsigned thread_count) {
    MetricsTable table;
    table.rows = degrees(graph);
    std::vector<double> bc = betweenness(graph, thread_count);
    for (std::size_t i = 0; i < table.rows.size(); ++i) table.rows[i].betweenness = bc[i];
    table.stats = GraphStats{graph.node_count(), graph.edge_count(), graph.total_weight()};
    return table;
}

} // namespace fwdnet
