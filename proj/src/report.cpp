#include "fwdnet/report.hpp"

#include "fwdnet/text.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace fwdnet {

namespace {

const char* role_color(Role role) {
    switch (role) {
    case Role::ConversationStarter: return "#1b9e77";
    case Role::Influencer: return "#d95f02";
    case Role::ActiveEngager: return "#7570b3";
    case Role::NetworkCreator: return "#e7298a";
    case Role::InformationBridge: return "#66a61e";
    case Role::None: break;
    }
    return "#cccccc";
}

std::string dot_quote(std::string_view value) {
    std::string out = "\"";
    for (char c : value) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::Csv;
    if (text == "json") return ReportFormat::Json;
    return std::nullopt;
}

std::vector<KeyUserRow> key_user_rows(const ForwardGraph& graph, const MetricsTable& metrics,
                                      const Partition& partition,
                                      std::span<const RoleAssignment> assignments) {
    if (metrics.rows.size() != graph.node_count() ||
        partition.assignment.size() != graph.node_count())
        throw Error(ErrorKind::InvalidArgument, "report inputs cover different node sets");
    std::vector<KeyUserRow> rows;
    for (const RoleAssignment& assignment : assignments) {
        if (assignment.role == Role::None) continue;
        KeyUserRow row;
        row.channel = graph.node(assignment.entity).username;
        row.role = assignment.role;
        row.f = metrics.rows[assignment.entity].frequency;
        row.in_degree = assignment.evidence.in_degree;
        row.out_degree = assignment.evidence.out_degree;
        row.betweenness = metrics.rows[assignment.entity].betweenness;
        row.community = partition.assignment[assignment.entity];
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_report(std::span<const KeyUserRow> rows, std::ostream& out, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        out << "Channel,Type,f,in_degree,out_degree,betweenness,community\r\n";
        for (const KeyUserRow& row : rows) {
            out << csv_field(row.channel) << ',' << role_name(row.role) << ',' << row.f << ','
                << row.in_degree << ',' << row.out_degree << ',' << format_double(row.betweenness)
                << ',' << row.community << "\r\n";
        }
    } else {
        nlohmann::json array = nlohmann::json::array();
        for (const KeyUserRow& row : rows) {
            array.push_back({{"channel", row.channel},
                             {"type", role_name(row.role)},
                             {"f", row.f},
                             {"in_degree", row.in_degree},
                             {"out_degree", row.out_degree},
                             {"betweenness", row.betweenness},
                             {"community", row.community}});
        }
        out << array.dump(2) << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, "report write failed");
}

void write_report(std::span<const KeyUserRow> rows, const std::filesystem::path& path,
                  ReportFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_report(rows, out, format);
}

std::vector<KeyUserRow> read_report_csv(std::istream& in) {
    std::vector<KeyUserRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else {
                field += c;
            }
        }
        fields.push_back(std::move(field));
        if (fields.size() != 7) throw Error(ErrorKind::Parse, "malformed report row");
        KeyUserRow row;
        row.channel = fields[0];
        row.role = role_from_name(fields[1]).value_or(Role::None);
        row.f = parse_uint(fields[2]).value_or(0);
        row.in_degree = static_cast<std::uint32_t>(parse_uint(fields[3]).value_or(0));
        row.out_degree = static_cast<std::uint32_t>(parse_uint(fields[4]).value_or(0));
        row.betweenness = parse_double(fields[5]).value_or(0.0);
        row.community = static_cast<std::uint32_t>(parse_uint(fields[6]).value_or(0));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_dot(const ForwardGraph& graph, std::span<const RoleAssignment> roles,
               std::ostream& out) {
    std::vector<Role> role_of(graph.node_count(), Role::None);
    for (const RoleAssignment& assignment : roles) {
        if (assignment.entity >= graph.node_count())
            throw Error(ErrorKind::InvalidArgument, "role assignment outside the graph");
        role_of[assignment.entity] = assignment.role;
    }
    out << "digraph forwarded_messages {\n";
    for (NodeId id = 0; id < graph.node_count(); ++id) {
        out << "  " << dot_quote(graph.node(id).username) << " [style=filled fillcolor="
            << dot_quote(role_color(role_of[id])) << "];\n";
    }
    for (const Edge& edge : graph.edges()) {
        out << "  " << dot_quote(graph.node(edge.source).username) << " -> "
            << dot_quote(graph.node(edge.target).username) << " [label=\"" << edge.weight
            << "\" weight=" << edge.weight << "];\n";
    }
    out << "}\n";
    if (!out) throw Error(ErrorKind::Io, "dot write failed");
}

void write_dot(const ForwardGraph& graph, std::span<const RoleAssignment> roles,
               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_dot(graph, roles, out);
}

} // namespace fwdnet
