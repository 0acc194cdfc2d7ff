#pragma once

#include "fwdnet/classify.hpp"
#include "fwdnet/community.hpp"
#include "fwdnet/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace fwdnet {

enum class ReportFormat { Csv, Json };

std::optional<ReportFormat> parse_report_format(std::string_view text);

/// One key-user table row; rows keep the classifier's ordering (frequency
/// descending).
struct KeyUserRow {
    std::string channel;
    Role role = Role::None;
    Weight f = 0;
    std::uint32_t in_degree = 0;
    std::uint32_t out_degree = 0;
    double betweenness = 0.0;
    std::uint32_t community = 0;

    bool operator==(const KeyUserRow&) const = default;
};

/// Rows for the assignments that carry a role, in assignment order.
/// Degrees come from the assignment evidence (self-loop-free).
std::vector<KeyUserRow> key_user_rows(const ForwardGraph& graph, const MetricsTable& metrics,
                                      const Partition& partition,
                                      std::span<const RoleAssignment> assignments);

/// CSV header: Channel,Type,f,in_degree,out_degree,betweenness,community.
/// Decimal point, no grouping.
void write_report(std::span<const KeyUserRow> rows, const std::filesystem::path& path,
                  ReportFormat format);
void write_report(std::span<const KeyUserRow> rows, std::ostream& out, ReportFormat format);

std::vector<KeyUserRow> read_report_csv(std::istream& in);

/// Directed DOT with role-based fill colors and weight-labelled edges.
void write_dot(const ForwardGraph& graph, std::span<const RoleAssignment> roles,
               const std::filesystem::path& path);
void write_dot(const ForwardGraph& graph, std::span<const RoleAssignment> roles,
               std::ostream& out);

} // namespace fwdnet
