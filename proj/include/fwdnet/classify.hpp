#pragma once

#include "fwdnet/metrics.hpp"

#include <optional>
#include <vector>

namespace fwdnet {

enum class Role : std::uint8_t {
    None = 0,
    ConversationStarter,
    Influencer,
    ActiveEngager,
    NetworkCreator,
    InformationBridge,
};

const char* role_name(Role role);
std::optional<Role> role_from_name(std::string_view name);

/// Operational thresholds for the role signatures. "High" degree is the
/// nearest-rank percentile over the eligible channels unless an absolute
/// threshold is set.
struct RoleConfig {
    double high_out_percentile = 0.75;
    double high_in_percentile = 0.75;
    double cs_max_ratio = 0.15; // in/out at or below this: conversation starter band
    double ae_min_ratio = 4.0;  // in/out at or above this: active engager band
    std::uint32_t influencer_min_in = 5;
    Weight min_frequency = 50;
    std::optional<std::uint32_t> absolute_high_out; // overrides the percentile
    std::optional<std::uint32_t> absolute_high_in;

    void validate() const;
};

/// Degrees here exclude self-loops; roles concern inter-entity influence.
struct RoleEvidence {
    std::uint32_t in_degree = 0;
    std::uint32_t out_degree = 0;
    double ratio = 0.0;
    std::vector<NodeId> influencers; // network creator: >= 2; bridge: exactly 1
    std::vector<NodeId> engagers;    // bridge: exactly 1
};

struct RoleAssignment {
    NodeId entity = 0;
    Role role = Role::None;
    RoleEvidence evidence;
};

/// Channels with frequency >= config.min_frequency, in node id order.
std::vector<NodeId> eligible_nodes(const ForwardGraph& graph, const MetricsTable& metrics,
                                   const RoleConfig& config);

/// Staged assignment over the eligible channels: degree-signature roles
/// first (conversation starter / influencer / active engager, mutually
/// exclusive ratio bands), then structural roles (network creator, then
/// information bridge) over what is left. Every eligible channel gets
/// exactly one entry; output is sorted by frequency descending with
/// username as tiebreaker.
std::vector<RoleAssignment> classify(const ForwardGraph& graph, const MetricsTable& metrics,
                                     const RoleConfig& config);

/// Nearest-rank percentile: the value at rank ceil(p * N) of the ascending
/// sample (1-indexed). Exposed for tests.
std::uint32_t percentile_threshold(std::vector<std::uint32_t> values, double percentile);

} // namespace fwdnet
