#include "fwdnet/graph.hpp"

#include <algorithm>

namespace fwdnet {

std::optional<NodeId> ForwardGraph::find(std::string_view username) const {
    auto it = index_.find(std::string(username));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const Arc> ForwardGraph::out_arcs(NodeId id) const {
    return {out_arcs_.data() + out_offsets_[id], out_offsets_[id + 1] - out_offsets_[id]};
}

std::span<const Arc> ForwardGraph::in_arcs(NodeId id) const {
    return {in_arcs_.data() + in_offsets_[id], in_offsets_[id + 1] - in_offsets_[id]};
}

Weight ForwardGraph::self_loop_weight(NodeId id) const {
    for (const Arc& arc : out_arcs(id)) {
        if (arc.node == id) return arc.weight;
        if (arc.node > id) break;
    }
    return 0;
}

void GraphBuilder::add_node(std::string_view username, EntityKind kind) {
    auto [it, inserted] = node_kinds_.emplace(std::string(username), kind);
    if (!inserted && kind > it->second) it->second = kind;
}

void GraphBuilder::add_edge(std::string_view source, std::string_view target, Weight weight) {
    add_node(source, EntityKind::Unknown);
    add_node(target, EntityKind::Unknown);
    edge_weights_[{std::string(source), std::string(target)}] += weight;
}

ForwardGraph GraphBuilder::build() && {
    ForwardGraph graph;
    graph.nodes_.reserve(node_kinds_.size());
    for (auto& [username, kind] : node_kinds_) {
        NodeId id = static_cast<NodeId>(graph.nodes_.size());
        graph.index_.emplace(username, id);
        graph.nodes_.push_back(Entity{username, kind});
    }

    graph.edges_.reserve(edge_weights_.size());
    for (const auto& [pair, weight] : edge_weights_) {
        Edge edge;
        edge.source = graph.index_.at(pair.first);
        edge.target = graph.index_.at(pair.second);
        edge.weight = weight;
        graph.total_weight_ += weight;
        graph.edges_.push_back(edge);
    }
    std::sort(graph.edges_.begin(), graph.edges_.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.source, a.target) < std::pair(b.source, b.target);
    });

    const std::size_t n = graph.nodes_.size();
    std::vector<std::size_t> out_count(n, 0), in_count(n, 0);
    for (const Edge& e : graph.edges_) {
        ++out_count[e.source];
        ++in_count[e.target];
    }
    graph.out_offsets_.assign(n + 1, 0);
    graph.in_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        graph.out_offsets_[i + 1] = graph.out_offsets_[i] + out_count[i];
        graph.in_offsets_[i + 1] = graph.in_offsets_[i] + in_count[i];
    }
    graph.out_arcs_.resize(graph.edges_.size());
    graph.in_arcs_.resize(graph.edges_.size());
    std::vector<std::size_t> out_pos(graph.out_offsets_.begin(), graph.out_offsets_.end() - 1);
    std::vector<std::size_t> in_pos(graph.in_offsets_.begin(), graph.in_offsets_.end() - 1);
    for (const Edge& e : graph.edges_) {
        graph.out_arcs_[out_pos[e.source]++] = Arc{e.target, e.weight};
        graph.in_arcs_[in_pos[e.target]++] = Arc{e.source, e.weight};
    }
    // out arcs are already target-sorted (edges are); in arcs need sorting
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(graph.in_arcs_.begin() + static_cast<std::ptrdiff_t>(graph.in_offsets_[i]),
                  graph.in_arcs_.begin() + static_cast<std::ptrdiff_t>(graph.in_offsets_[i + 1]),
                  [](const Arc& a, const Arc& b) { return a.node < b.node; });
    }
    return graph;
}

EntityRegistry EntityRegistry::from_records(std::span<const ForwardRecord> records) {
    EntityRegistry registry;
    for (const ForwardRecord& record : records) {
        if (!record.chat.empty()) registry.observe_chat(record.chat, record.chat_kind);
        if (record.has_forward_source())
            registry.observe_source(record.forward_source, record.forward_source_kind);
    }
    return registry;
}

void EntityRegistry::observe_chat(std::string_view username, EntityKind kind) {
    Observation& obs = observations_[std::string(username)];
    if (kind > obs.chat) obs.chat = kind;
}

void EntityRegistry::observe_source(std::string_view username, EntityKind kind) {
    Observation& obs = observations_[std::string(username)];
    if (kind > obs.source) obs.source = kind;
}

EntityKind EntityRegistry::kind_of(std::string_view username) const {
    auto it = observations_.find(std::string(username));
    if (it == observations_.end()) return EntityKind::Unknown;
    if (it->second.chat != EntityKind::Unknown) return it->second.chat;
    return it->second.source;
}

BuildResult build_graph(std::span<const ForwardRecord> records, const EntityRegistry& registry) {
    GraphBuilder builder;
    BuildTally tally;
    for (const ForwardRecord& record : records) {
        ++tally.records_seen;
        if (record.chat.empty()) {
            ++tally.records_skipped;
            ++tally.skip_reasons["missing chat"];
            continue;
        }
        if (record.chat_kind == EntityKind::User) {
            ++tally.records_skipped;
            ++tally.skip_reasons["chat is a user"];
            continue;
        }
        builder.add_node(record.chat, registry.kind_of(record.chat));
        if (!record.has_forward_source()) continue;
        builder.add_node(record.forward_source, registry.kind_of(record.forward_source));
        builder.add_edge(record.forward_source, record.chat, 1);
        ++tally.edge_records;
    }
    return BuildResult{std::move(builder).build(), std::move(tally)};
}

std::vector<NodeMetrics> degrees(const ForwardGraph& graph) {
    std::vector<NodeMetrics> metrics(graph.node_count());
    for (const Edge& edge : graph.edges()) {
        NodeMetrics& src = metrics[edge.source];
        NodeMetrics& dst = metrics[edge.target];
        ++src.out_degree;
        src.weighted_out += edge.weight;
        ++dst.in_degree;
        dst.weighted_in += edge.weight;
    }
    for (NodeMetrics& m : metrics) m.frequency = m.weighted_in + m.weighted_out;
    return metrics;
}

ForwardGraph filter_min_frequency(const ForwardGraph& graph, Weight min_frequency) {
    std::vector<NodeMetrics> metrics = degrees(graph);
    std::vector<bool> keep(graph.node_count(), false);
    GraphBuilder builder;
    for (NodeId id = 0; id < graph.node_count(); ++id) {
        if (metrics[id].frequency >= min_frequency) {
            keep[id] = true;
            builder.add_node(graph.node(id).username, graph.node(id).kind);
        }
    }
    for (const Edge& edge : graph.edges()) {
        if (keep[edge.source] && keep[edge.target]) {
            builder.add_edge(graph.node(edge.source).username,
                             graph.node(edge.target).username, edge.weight);
        }
    }
    return std::move(builder).build();
}

} // namespace fwdnet
