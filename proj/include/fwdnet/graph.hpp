#pragma once

#include "fwdnet/types.hpp"

#include <map>
#include <span>
#include <unordered_map>
#include <vector>

namespace fwdnet {

/// Directed edge: content originally authored by `source` was forwarded into
/// the chat `target`. Weight counts the forwarded messages aggregated on the
/// pair.
struct Edge {
    NodeId source = 0;
    NodeId target = 0;
    Weight weight = 0;

    bool operator==(const Edge&) const = default;
};

struct Arc {
    NodeId node = 0;
    Weight weight = 0;

    bool operator==(const Arc&) const = default;
};

/// Immutable directed weighted forwarding graph. Node ids are dense indices
/// assigned in lexicographic username order, so graphs built from permuted
/// record sequences compare equal.
class ForwardGraph {
public:
    ForwardGraph() = default;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    Weight total_weight() const { return total_weight_; }

    const Entity& node(NodeId id) const { return nodes_[id]; }
    const std::vector<Entity>& nodes() const { return nodes_; }
    std::optional<NodeId> find(std::string_view username) const;

    /// Edges sorted by (source, target).
    const std::vector<Edge>& edges() const { return edges_; }

    /// Outgoing arcs of `id`, sorted by target id. Includes self-loops.
    std::span<const Arc> out_arcs(NodeId id) const;
    /// Incoming arcs of `id`, sorted by source id. Includes self-loops.
    std::span<const Arc> in_arcs(NodeId id) const;

    Weight self_loop_weight(NodeId id) const;

    bool operator==(const ForwardGraph& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_;
    }

private:
    friend class GraphBuilder;

    std::vector<Entity> nodes_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<Edge> edges_;
    Weight total_weight_ = 0;
    std::vector<Arc> out_arcs_;
    std::vector<std::size_t> out_offsets_;
    std::vector<Arc> in_arcs_;
    std::vector<std::size_t> in_offsets_;
};

/// Accumulates nodes and weighted edges, then freezes them into a
/// ForwardGraph. Single-writer; the result is safe for concurrent reads.
class GraphBuilder {
public:
    void add_node(std::string_view username, EntityKind kind);
    void add_edge(std::string_view source, std::string_view target, Weight weight = 1);
    ForwardGraph build() &&;

private:
    std::map<std::string, EntityKind> node_kinds_;
    std::map<std::pair<std::string, std::string>, Weight> edge_weights_;
};

/// Resolves usernames to entity kinds from what the records say. Chat-side
/// observations outrank forward-source observations; conflicting kinds on the
/// same side resolve to the highest of Channel > Group > User. The resolution
/// is insensitive to record order.
class EntityRegistry {
public:
    static EntityRegistry from_records(std::span<const ForwardRecord> records);

    void observe_chat(std::string_view username, EntityKind kind);
    void observe_source(std::string_view username, EntityKind kind);
    EntityKind kind_of(std::string_view username) const;

private:
    struct Observation {
        EntityKind chat = EntityKind::Unknown;
        EntityKind source = EntityKind::Unknown;
    };
    std::unordered_map<std::string, Observation> observations_;
};

struct BuildTally {
    std::uint64_t records_seen = 0;
    std::uint64_t edge_records = 0;
    std::uint64_t records_skipped = 0;
    std::map<std::string, std::uint64_t> skip_reasons;
};

struct BuildResult {
    ForwardGraph graph;
    BuildTally tally;
};

/// Builds the forwarding graph. One node per distinct username seen as chat
/// or forward source; one edge per distinct (forward_source, chat) pair with
/// weight equal to the number of contributing records. Records whose chat is
/// a user (or missing) are skipped and tallied. Records without a qualifying
/// forward source create the chat node only.
BuildResult build_graph(std::span<const ForwardRecord> records, const EntityRegistry& registry);

/// Per-node degree metrics with betweenness left at zero. In/out degree count
/// distinct neighbors (self-loops count the node itself once); weighted
/// degrees sum edge weights; frequency = weighted_in + weighted_out.
struct NodeMetrics {
    std::uint32_t in_degree = 0;
    std::uint32_t out_degree = 0;
    Weight weighted_in = 0;
    Weight weighted_out = 0;
    Weight frequency = 0;
    double betweenness = 0.0;

    bool operator==(const NodeMetrics&) const = default;
};

std::vector<NodeMetrics> degrees(const ForwardGraph& graph);

/// Subgraph induced on nodes with frequency >= min_frequency; surviving edges
/// keep their weights. Node ids are reassigned densely.
ForwardGraph filter_min_frequency(const ForwardGraph& graph, Weight min_frequency);

} // namespace fwdnet
