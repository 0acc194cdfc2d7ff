#include "fwdnet/gexf.hpp"

#include "fwdnet/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace fwdnet {

namespace {

// --- minimal XML reader, sufficient for the documents this module writes ---

struct XmlElement {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlElement> children;

    const std::string* attr(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return &v;
        return nullptr;
    }

    const XmlElement* child(std::string_view tag) const {
        for (const XmlElement& c : children)
            if (c.name == tag) return &c;
        return nullptr;
    }
};

class XmlParser {
public:
    explicit XmlParser(std::string_view text) : text_(text) {}

    XmlElement parse_document() {
        skip_misc();
        XmlElement root = parse_element();
        skip_misc();
        if (pos_ != text_.size()) fail("trailing content after root element");
        return root;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw Error(ErrorKind::Parse, "xml: " + what + " at offset " + std::to_string(pos_));
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                text_[pos_] == '\r'))
            ++pos_;
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                std::size_t end = text_.find("?>", pos_);
                if (end == std::string_view::npos) fail("unterminated processing instruction");
                pos_ = end + 2;
            } else if (starts_with("<!--")) {
                std::size_t end = text_.find("-->", pos_);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos_ = end + 3;
            } else {
                return;
            }
        }
    }

    static bool name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-' || c == '.' || c == ':';
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
        if (pos_ == start) fail("expected a name");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string unescape(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out += raw[i];
                continue;
            }
            std::size_t semi = raw.find(';', i);
            if (semi == std::string_view::npos) fail("unterminated entity");
            std::string_view entity = raw.substr(i + 1, semi - i - 1);
            if (entity == "amp") out += '&';
            else if (entity == "lt") out += '<';
            else if (entity == "gt") out += '>';
            else if (entity == "quot") out += '"';
            else if (entity == "apos") out += '\'';
            else fail("unsupported entity &" + std::string(entity) + ";");
            i = semi;
        }
        return out;
    }

    XmlElement parse_element() {
        if (peek() != '<') fail("expected '<'");
        ++pos_;
        XmlElement element;
        element.name = parse_name();
        for (;;) {
            skip_ws();
            if (starts_with("/>")) {
                pos_ += 2;
                return element;
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            std::string key = parse_name();
            skip_ws();
            if (peek() != '=') fail("expected '=' in attribute");
            ++pos_;
            skip_ws();
            char quote = peek();
            if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
            ++pos_;
            std::size_t end = text_.find(quote, pos_);
            if (end == std::string_view::npos) fail("unterminated attribute value");
            element.attrs.emplace_back(std::move(key), unescape(text_.substr(pos_, end - pos_)));
            pos_ = end + 1;
        }
        // content: child elements and (ignored) character data
        for (;;) {
            std::size_t lt = text_.find('<', pos_);
            if (lt == std::string_view::npos) fail("unterminated element <" + element.name + ">");
            pos_ = lt;
            if (starts_with("</")) {
                pos_ += 2;
                std::string closing = parse_name();
                if (closing != element.name) fail("mismatched closing tag </" + closing + ">");
                skip_ws();
                if (peek() != '>') fail("expected '>' after closing tag");
                ++pos_;
                return element;
            }
            if (starts_with("<!--")) {
                std::size_t end = text_.find("-->", pos_);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos_ = end + 3;
                continue;
            }
            element.children.push_back(parse_element());
        }
    }
};

// node attribute declaration order; ids double as array indices
constexpr const char* kNodeAttributes[][2] = {
    {"kind", "string"},      {"f", "long"},         {"in_degree", "long"},
    {"out_degree", "long"},  {"betweenness", "double"}, {"community", "long"},
    {"role", "string"},
};

double viz_size(double betweenness, double max_betweenness) {
    if (max_betweenness <= 0.0) return 1.0;
    return 1.0 + 9.0 * (betweenness / max_betweenness);
}

} // namespace

void write_gexf(const ForwardGraph& graph, const MetricsTable& metrics,
                const Partition& partition, std::span<const RoleAssignment> roles,
                const Layout& layout, std::ostream& out) {
    const std::size_t n = graph.node_count();
    if (metrics.rows.size() != n || partition.assignment.size() != n ||
        layout.coordinates.size() != n)
        throw Error(ErrorKind::InvalidArgument, "gexf inputs cover different node sets");
    std::vector<Role> role_of(n, Role::None);
    for (const RoleAssignment& assignment : roles) {
        if (assignment.entity >= n)
            throw Error(ErrorKind::InvalidArgument, "role assignment outside the graph");
        role_of[assignment.entity] = assignment.role;
    }

    double max_bc = 0.0;
    for (const NodeMetrics& row : metrics.rows) max_bc = std::max(max_bc, row.betweenness);

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<gexf xmlns=\"http://www.gexf.net/1.2draft\" "
           "xmlns:viz=\"http://www.gexf.net/1.2draft/viz\" version=\"1.2\">\n";
    out << "  <graph defaultedgetype=\"directed\">\n";
    out << "    <attributes class=\"node\">\n";
    for (std::size_t i = 0; i < std::size(kNodeAttributes); ++i) {
        out << "      <attribute id=\"" << i << "\" title=\"" << kNodeAttributes[i][0]
            << "\" type=\"" << kNodeAttributes[i][1] << "\"/>\n";
    }
    out << "    </attributes>\n";
    out << "    <nodes>\n";
    for (NodeId id = 0; id < n; ++id) {
        const Entity& entity = graph.node(id);
        const NodeMetrics& row = metrics.rows[id];
        const std::string name = xml_escape(entity.username);
        out << "      <node id=\"" << name << "\" label=\"" << name << "\">\n";
        out << "        <attvalues>\n";
        out << "          <attvalue for=\"0\" value=\"" << to_string(entity.kind) << "\"/>\n";
        out << "          <attvalue for=\"1\" value=\"" << row.frequency << "\"/>\n";
        out << "          <attvalue for=\"2\" value=\"" << row.in_degree << "\"/>\n";
        out << "          <attvalue for=\"3\" value=\"" << row.out_degree << "\"/>\n";
        out << "          <attvalue for=\"4\" value=\"" << format_double(row.betweenness)
            << "\"/>\n";
        out << "          <attvalue for=\"5\" value=\"" << partition.assignment[id] << "\"/>\n";
        out << "          <attvalue for=\"6\" value=\"" << role_name(role_of[id]) << "\"/>\n";
        out << "        </attvalues>\n";
        out << "        <viz:position x=\"" << format_double(layout.coordinates[id].x)
            << "\" y=\"" << format_double(layout.coordinates[id].y) << "\" z=\"0\"/>\n";
        out << "        <viz:size value=\"" << format_double(viz_size(row.betweenness, max_bc))
            << "\"/>\n";
        out << "      </node>\n";
    }
    out << "    </nodes>\n";
    out << "    <edges>\n";
    std::size_t edge_id = 0;
    for (const Edge& edge : graph.edges()) {
        out << "      <edge id=\"" << edge_id++ << "\" source=\""
            << xml_escape(graph.node(edge.source).username) << "\" target=\""
            << xml_escape(graph.node(edge.target).username) << "\" weight=\"" << edge.weight
            << "\"/>\n";
    }
    out << "    </edges>\n";
    out << "  </graph>\n";
    out << "</gexf>\n";
    if (!out) throw Error(ErrorKind::Io, "gexf write failed");
}

void write_gexf(const ForwardGraph& graph, const MetricsTable& metrics,
                const Partition& partition, std::span<const RoleAssignment> roles,
                const Layout& layout, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_gexf(graph, metrics, partition, roles, layout, out);
}

GexfData read_gexf(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    XmlElement root = XmlParser(text).parse_document();
    if (root.name != "gexf") throw Error(ErrorKind::Parse, "not a gexf document");
    const XmlElement* graph_el = root.child("graph");
    if (!graph_el) throw Error(ErrorKind::Parse, "gexf document without <graph>");

    std::unordered_map<std::string, std::string> attribute_titles; // attr id -> title
    if (const XmlElement* attributes = graph_el->child("attributes")) {
        for (const XmlElement& attribute : attributes->children) {
            const std::string* id = attribute.attr("id");
            const std::string* title = attribute.attr("title");
            if (id && title) attribute_titles[*id] = *title;
        }
    }

    struct ParsedNode {
        std::string id;
        EntityKind kind = EntityKind::Unknown;
        NodeMetrics row;
        std::uint32_t community = 0;
        Role role = Role::None;
        Vec2 position;
    };
    std::vector<ParsedNode> parsed_nodes;
    if (const XmlElement* nodes_el = graph_el->child("nodes")) {
        for (const XmlElement& node_el : nodes_el->children) {
            if (node_el.name != "node") continue;
            ParsedNode node;
            const std::string* id = node_el.attr("id");
            if (!id || id->empty()) throw Error(ErrorKind::Parse, "gexf node without id");
            node.id = *id;
            if (const XmlElement* attvalues = node_el.child("attvalues")) {
                for (const XmlElement& attvalue : attvalues->children) {
                    const std::string* for_id = attvalue.attr("for");
                    const std::string* value = attvalue.attr("value");
                    if (!for_id || !value) continue;
                    auto title_it = attribute_titles.find(*for_id);
                    if (title_it == attribute_titles.end()) continue;
                    const std::string& title = title_it->second;
                    if (title == "kind") {
                        node.kind = parse_entity_kind(*value).value_or(EntityKind::Unknown);
                    } else if (title == "f") {
                        node.row.frequency = parse_uint(*value).value_or(0);
                    } else if (title == "in_degree") {
                        node.row.in_degree = static_cast<std::uint32_t>(parse_uint(*value).value_or(0));
                    } else if (title == "out_degree") {
                        node.row.out_degree = static_cast<std::uint32_t>(parse_uint(*value).value_or(0));
                    } else if (title == "betweenness") {
                        node.row.betweenness = parse_double(*value).value_or(0.0);
                    } else if (title == "community") {
                        node.community = static_cast<std::uint32_t>(parse_uint(*value).value_or(0));
                    } else if (title == "role") {
                        node.role = role_from_name(*value).value_or(Role::None);
                    }
                }
            }
            for (const XmlElement& child : node_el.children) {
                if (child.name == "viz:position") {
                    if (const std::string* x = child.attr("x"))
                        node.position.x = parse_double(*x).value_or(0.0);
                    if (const std::string* y = child.attr("y"))
                        node.position.y = parse_double(*y).value_or(0.0);
                }
            }
            parsed_nodes.push_back(std::move(node));
        }
    }

    GraphBuilder builder;
    for (const ParsedNode& node : parsed_nodes) builder.add_node(node.id, node.kind);
    if (const XmlElement* edges_el = graph_el->child("edges")) {
        for (const XmlElement& edge_el : edges_el->children) {
            if (edge_el.name != "edge") continue;
            const std::string* source = edge_el.attr("source");
            const std::string* target = edge_el.attr("target");
            if (!source || !target) throw Error(ErrorKind::Parse, "gexf edge without endpoints");
            Weight weight = 1;
            if (const std::string* w = edge_el.attr("weight")) weight = parse_uint(*w).value_or(1);
            builder.add_edge(*source, *target, weight);
        }
    }

    GexfData data;
    data.graph = std::move(builder).build();
    const std::size_t n = data.graph.node_count();
    data.metrics.rows.assign(n, NodeMetrics{});
    data.metrics.stats =
        GraphStats{n, data.graph.edge_count(), data.graph.total_weight()};
    data.partition.assignment.assign(n, 0);
    data.layout.coordinates.assign(n, Vec2{});
    std::uint32_t max_community = 0;
    for (const ParsedNode& node : parsed_nodes) {
        auto id = data.graph.find(node.id);
        if (!id) continue;
        data.metrics.rows[*id] = node.row;
        data.partition.assignment[*id] = node.community;
        max_community = std::max(max_community, node.community);
        data.layout.coordinates[*id] = node.position;
        if (node.role != Role::None) {
            RoleAssignment assignment;
            assignment.entity = *id;
            assignment.role = node.role;
            data.roles.push_back(assignment);
        }
    }
    data.partition.community_count = parsed_nodes.empty() ? 0 : max_community + 1;
    std::sort(data.roles.begin(), data.roles.end(),
              [](const RoleAssignment& a, const RoleAssignment& b) { return a.entity < b.entity; });
    return data;
}

GexfData read_gexf(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    return read_gexf(in);
}

} // namespace fwdnet
