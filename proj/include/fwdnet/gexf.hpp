#pragma once

#include "fwdnet/classify.hpp"
#include "fwdnet/community.hpp"
#include "fwdnet/layout.hpp"
#include "fwdnet/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>

namespace fwdnet {

/// GEXF 1.2 export: directed graph, edge weights, node attributes (kind, f,
/// in_degree, out_degree, betweenness, community, role), viz position from
/// the layout and viz size scaled by betweenness above a floor of 1. Nodes
/// are ordered by id and edges by (source, target), so the output is
/// deterministic. Throws Error{InvalidArgument} when the inputs do not cover
/// the same node set and Error{Io} on write failure.
void write_gexf(const ForwardGraph& graph, const MetricsTable& metrics,
                const Partition& partition, std::span<const RoleAssignment> roles,
                const Layout& layout, const std::filesystem::path& path);

void write_gexf(const ForwardGraph& graph, const MetricsTable& metrics,
                const Partition& partition, std::span<const RoleAssignment> roles,
                const Layout& layout, std::ostream& out);

/// Everything a GEXF file round-trips. Role evidence is not serialized, so
/// parsed assignments carry role labels only.
struct GexfData {
    ForwardGraph graph;
    MetricsTable metrics;
    Partition partition;
    std::vector<RoleAssignment> roles;
    Layout layout;
};

GexfData read_gexf(const std::filesystem::path& path);
GexfData read_gexf(std::istream& in);

} // namespace fwdnet
