#include "fwdnet/classify.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace fwdnet {

const char* role_name(Role role) {
    switch (role) {
    case Role::ConversationStarter: return "conversation_starter";
    case Role::Influencer: return "influencer";
    case Role::ActiveEngager: return "active_engager";
    case Role::NetworkCreator: return "network_creator";
    case Role::InformationBridge: return "information_bridge";
    case Role::None: break;
    }
    return "none";
}

std::optional<Role> role_from_name(std::string_view name) {
    if (name == "conversation_starter") return Role::ConversationStarter;
    if (name == "influencer") return Role::Influencer;
    if (name == "active_engager") return Role::ActiveEngager;
    if (name == "network_creator") return Role::NetworkCreator;
    if (name == "information_bridge") return Role::InformationBridge;
    if (name == "none") return Role::None;
    return std::nullopt;
}

void RoleConfig::validate() const {
    if (high_out_percentile <= 0.0 || high_out_percentile > 1.0 ||
        high_in_percentile <= 0.0 || high_in_percentile > 1.0)
        throw Error(ErrorKind::Config, "percentiles must lie in (0, 1]");
    if (cs_max_ratio <= 0.0 || ae_min_ratio <= 0.0)
        throw Error(ErrorKind::Config, "ratio thresholds must be positive");
    if (cs_max_ratio >= ae_min_ratio)
        throw Error(ErrorKind::Config, "cs_max_ratio must stay below ae_min_ratio");
}

std::uint32_t percentile_threshold(std::vector<std::uint32_t> values, double percentile) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile * n));
    if (rank == 0) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

std::vector<NodeId> eligible_nodes(const ForwardGraph& graph, const MetricsTable& metrics,
                                   const RoleConfig& config) {
    if (metrics.rows.size() != graph.node_count())
        throw Error(ErrorKind::InvalidArgument, "metrics do not cover the graph");
    std::vector<NodeId> eligible;
    for (NodeId id = 0; id < graph.node_count(); ++id) {
        if (graph.node(id).kind == EntityKind::Channel &&
            metrics.rows[id].frequency >= config.min_frequency)
            eligible.push_back(id);
    }
    return eligible;
}

namespace {

struct LoopFreeDegrees {
    std::uint32_t in = 0;
    std::uint32_t out = 0;
};

LoopFreeDegrees loop_free_degrees(const ForwardGraph& graph, NodeId id) {
    LoopFreeDegrees d;
    for (const Arc& arc : graph.in_arcs(id))
        if (arc.node != id) ++d.in;
    for (const Arc& arc : graph.out_arcs(id))
        if (arc.node != id) ++d.out;
    return d;
}

} // namespace

std::vector<RoleAssignment> classify(const ForwardGraph& graph, const MetricsTable& metrics,
                                     const RoleConfig& config) {
    config.validate();
    std::vector<NodeId> eligible = eligible_nodes(graph, metrics, config);

    std::vector<LoopFreeDegrees> degrees_of(graph.node_count());
    std::vector<std::uint32_t> out_sample, in_sample;
    out_sample.reserve(eligible.size());
    in_sample.reserve(eligible.size());
    for (NodeId id : eligible) {
        degrees_of[id] = loop_free_degrees(graph, id);
        out_sample.push_back(degrees_of[id].out);
        in_sample.push_back(degrees_of[id].in);
    }
    const std::uint32_t high_out = config.absolute_high_out
        ? *config.absolute_high_out
        : percentile_threshold(out_sample, config.high_out_percentile);
    const std::uint32_t high_in = config.absolute_high_in
        ? *config.absolute_high_in
        : percentile_threshold(in_sample, config.high_in_percentile);

    std::vector<Role> role_of(graph.node_count(), Role::None);
    std::vector<RoleAssignment> assignments;
    assignments.reserve(eligible.size());

    // Stage 1: degree-signature roles over disjoint in/out ratio bands.
    for (NodeId id : eligible) {
        const LoopFreeDegrees d = degrees_of[id];
        const double ratio =
            static_cast<double>(d.in) / static_cast<double>(std::max<std::uint32_t>(d.out, 1));
        Role role = Role::None;
        if (d.out >= high_out && ratio <= config.cs_max_ratio) {
            role = Role::ConversationStarter;
        } else if (d.out >= high_out && d.in >= config.influencer_min_in &&
                   ratio > config.cs_max_ratio && ratio < config.ae_min_ratio) {
            role = Role::Influencer;
        } else if (d.in >= high_in && ratio >= config.ae_min_ratio) {
            role = Role::ActiveEngager;
        }
        role_of[id] = role;
        RoleAssignment assignment;
        assignment.entity = id;
        assignment.role = role;
        assignment.evidence.in_degree = d.in;
        assignment.evidence.out_degree = d.out;
        assignment.evidence.ratio = ratio;
        assignments.push_back(std::move(assignment));
    }

    // Stage 2: structural roles for eligible channels still unassigned.
    for (RoleAssignment& assignment : assignments) {
        if (assignment.role != Role::None) continue;
        const NodeId id = assignment.entity;

        std::unordered_set<NodeId> seen;
        std::vector<NodeId> adjacent_influencers;
        auto note_adjacent = [&](NodeId other) {
            if (other == id || !seen.insert(other).second) return;
            if (role_of[other] == Role::Influencer) adjacent_influencers.push_back(other);
        };
        for (const Arc& arc : graph.in_arcs(id)) note_adjacent(arc.node);
        for (const Arc& arc : graph.out_arcs(id)) note_adjacent(arc.node);

        if (adjacent_influencers.size() >= 2) {
            std::sort(adjacent_influencers.begin(), adjacent_influencers.end());
            assignment.role = Role::NetworkCreator;
            assignment.evidence.influencers = std::move(adjacent_influencers);
            role_of[id] = Role::NetworkCreator;
            continue;
        }

        // Information bridge: influencer on one side, active engager on the
        // other, in either orientation. Evidence keeps the lowest-id pair.
        std::optional<NodeId> in_influencer, in_engager, out_influencer, out_engager;
        for (const Arc& arc : graph.in_arcs(id)) {
            if (arc.node == id) continue;
            if (role_of[arc.node] == Role::Influencer && !in_influencer) in_influencer = arc.node;
            if (role_of[arc.node] == Role::ActiveEngager && !in_engager) in_engager = arc.node;
        }
        for (const Arc& arc : graph.out_arcs(id)) {
            if (arc.node == id) continue;
            if (role_of[arc.node] == Role::Influencer && !out_influencer) out_influencer = arc.node;
            if (role_of[arc.node] == Role::ActiveEngager && !out_engager) out_engager = arc.node;
        }
        if (in_influencer && out_engager) {
            assignment.role = Role::InformationBridge;
            assignment.evidence.influencers = {*in_influencer};
            assignment.evidence.engagers = {*out_engager};
            role_of[id] = Role::InformationBridge;
        } else if (in_engager && out_influencer) {
            assignment.role = Role::InformationBridge;
            assignment.evidence.influencers = {*out_influencer};
            assignment.evidence.engagers = {*in_engager};
            role_of[id] = Role::InformationBridge;
        }
    }

    std::sort(assignments.begin(), assignments.end(),
              [&](const RoleAssignment& a, const RoleAssignment& b) {
                  const Weight fa = metrics.rows[a.entity].frequency;
                  const Weight fb = metrics.rows[b.entity].frequency;
                  if (fa != fb) return fa > fb;
                  return graph.node(a.entity).username < graph.node(b.entity).username;
              });
    return assignments;
}

} // namespace fwdnet
