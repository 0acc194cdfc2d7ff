#pragma once

#include "fwdnet/classify.hpp"
#include "fwdnet/graph.hpp"

#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace fwdnet::test {

inline std::string padded(const char* prefix, std::size_t i) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%s%04zu", prefix, i);
    return buffer;
}

struct EdgeSpec {
    std::string source;
    std::string target;
    Weight weight = 1;
};

inline ForwardGraph make_graph(const std::vector<EdgeSpec>& edges,
                               const std::map<std::string, EntityKind>& kinds = {},
                               const std::vector<std::string>& isolated = {}) {
    GraphBuilder builder;
    for (const auto& [name, kind] : kinds) builder.add_node(name, kind);
    for (const std::string& name : isolated) builder.add_node(name, EntityKind::Unknown);
    for (const EdgeSpec& edge : edges) builder.add_edge(edge.source, edge.target, edge.weight);
    return std::move(builder).build();
}

/// Seeded digraph over n nodes; every ordered pair appears with probability p,
/// weights uniform in [1, max_weight]. No self-loops unless asked.
inline ForwardGraph random_digraph(std::size_t n, double p, std::mt19937_64& rng,
                                   Weight max_weight = 1, bool self_loops = false) {
    GraphBuilder builder;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<Weight> weight(1, max_weight);
    for (std::size_t i = 0; i < n; ++i) builder.add_node(padded("n", i), EntityKind::Channel);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j && !self_loops) continue;
            if (coin(rng) < p)
                builder.add_edge(padded("n", i), padded("n", j), weight(rng));
        }
    }
    return std::move(builder).build();
}

/// Directed path n0 -> n1 -> ... -> n(k-1).
inline ForwardGraph path_graph(std::size_t length) {
    GraphBuilder builder;
    for (std::size_t i = 0; i < length; ++i) builder.add_node(padded("n", i), EntityKind::Channel);
    for (std::size_t i = 0; i + 1 < length; ++i)
        builder.add_edge(padded("n", i), padded("n", i + 1), 1);
    return std::move(builder).build();
}

/// Zachary's karate club (34 nodes, 78 edges), the standard community
/// detection fixture. Directed arbitrarily low->high; community analyses use
/// the undirected projection.
inline ForwardGraph karate_club() {
    static const int edges[][2] = {
        {0, 1},   {0, 2},   {0, 3},   {0, 4},   {0, 5},   {0, 6},   {0, 7},   {0, 8},
        {0, 10},  {0, 11},  {0, 12},  {0, 13},  {0, 17},  {0, 19},  {0, 21},  {0, 31},
        {1, 2},   {1, 3},   {1, 7},   {1, 13},  {1, 17},  {1, 19},  {1, 21},  {1, 30},
        {2, 3},   {2, 7},   {2, 8},   {2, 9},   {2, 13},  {2, 27},  {2, 28},  {2, 32},
        {3, 7},   {3, 12},  {3, 13},  {4, 6},   {4, 10},  {5, 6},   {5, 10},  {5, 16},
        {6, 16},  {8, 30},  {8, 32},  {8, 33},  {9, 33},  {13, 33}, {14, 32}, {14, 33},
        {15, 32}, {15, 33}, {18, 32}, {18, 33}, {19, 33}, {20, 32}, {20, 33}, {22, 32},
        {22, 33}, {23, 25}, {23, 27}, {23, 29}, {23, 32}, {23, 33}, {24, 25}, {24, 27},
        {24, 31}, {25, 31}, {26, 29}, {26, 33}, {27, 33}, {28, 31}, {28, 33}, {29, 32},
        {29, 33}, {30, 32}, {30, 33}, {31, 32}, {31, 33}, {32, 33},
    };
    GraphBuilder builder;
    for (std::size_t i = 0; i < 34; ++i) builder.add_node(padded("m", i), EntityKind::Channel);
    for (const auto& edge : edges)
        builder.add_edge(padded("m", static_cast<std::size_t>(edge[0])),
                         padded("m", static_cast<std::size_t>(edge[1])), 1);
    return std::move(builder).build();
}

/// The key-user fixture: eight channels with the published degree tuples and
/// frequencies, the network creators wired to both influencers, plus 40
/// filler channels shaped so the default percentile thresholds land between
/// the network creators' and the influencers' out-degrees.
struct KeyUserFixture {
    ForwardGraph graph;
    std::map<std::string, Role> expected_roles;
};

inline KeyUserFixture key_user_fixture() {
    struct Named {
        const char* name;
        std::uint32_t in;
        std::uint32_t out;
        Weight f;
        Role role;
    };
    const Named named[] = {
        {"jairbolsonarobrasil", 0, 38, 1491, Role::ConversationStarter},
        {"ospatriotas", 12, 29, 1373, Role::Influencer},
        {"qbrasilnews", 47, 24, 919, Role::NetworkCreator},
        {"juventuderevoltada", 130, 16, 916, Role::ActiveEngager},
        {"ordemdourada_oficial", 57, 21, 757, Role::NetworkCreator},
        {"oinformanteoficial", 4, 38, 551, Role::ConversationStarter},
        {"contraototalitarismodanom", 41, 4, 461, Role::ActiveEngager},
        {"bielconn", 26, 30, 349, Role::Influencer},
    };

    GraphBuilder builder;
    for (const Named& node : named) builder.add_node(node.name, EntityKind::Channel);

    // the network creators connect the two influencer channels
    const std::vector<EdgeSpec> structural = {
        {"ospatriotas", "qbrasilnews", 1},
        {"bielconn", "qbrasilnews", 1},
        {"ospatriotas", "ordemdourada_oficial", 1},
        {"bielconn", "ordemdourada_oficial", 1},
    };
    std::map<std::string, std::uint32_t> in_used, out_used;
    for (const EdgeSpec& edge : structural) {
        builder.add_edge(edge.source, edge.target, edge.weight);
        ++out_used[edge.source];
        ++in_used[edge.target];
    }

    std::size_t serial = 0;
    for (const Named& node : named) {
        const std::uint32_t pad_in = node.in - in_used[node.name];
        const std::uint32_t pad_out = node.out - out_used[node.name];
        // all padding edges carry weight 1 except the first, which absorbs
        // the remaining frequency budget
        Weight extra = node.f - node.in - node.out;
        for (std::uint32_t i = 0; i < pad_in; ++i) {
            const std::string user = padded("bguser", serial++);
            builder.add_node(user, EntityKind::User);
            builder.add_edge(user, node.name, i == 0 && pad_out == 0 ? 1 + extra : 1);
        }
        for (std::uint32_t i = 0; i < pad_out; ++i) {
            const std::string group = padded("bggroup", serial++);
            builder.add_node(group, EntityKind::Group);
            builder.add_edge(node.name, group, i == 0 ? 1 + extra : 1);
        }
    }

    // nine mid fillers pin the 75th-percentile out-degree at 25; in-degree 4
    // with ratio 0.16 keeps them out of every stage-1 band
    for (std::size_t f = 0; f < 9; ++f) {
        const std::string filler = padded("fillermid", f);
        builder.add_node(filler, EntityKind::Channel);
        for (std::size_t i = 0; i < 25; ++i) {
            const std::string group = padded("bggroup", serial++);
            builder.add_node(group, EntityKind::Group);
            builder.add_edge(filler, group, i == 0 ? 32 : 1); // f = 60
        }
        for (std::size_t i = 0; i < 4; ++i) {
            const std::string user = padded("bguser", serial++);
            builder.add_node(user, EntityKind::User);
            builder.add_edge(user, filler, 1);
        }
    }
    // low-degree fillers: one heavy inbound edge keeps them eligible
    for (std::size_t f = 0; f < 31; ++f) {
        const std::string filler = padded("fillerlow", f);
        builder.add_node(filler, EntityKind::Channel);
        const std::string user = padded("bguser", serial++);
        builder.add_node(user, EntityKind::User);
        builder.add_edge(user, filler, 60);
    }

    KeyUserFixture fixture;
    fixture.graph = std::move(builder).build();
    for (const Named& node : named) fixture.expected_roles[node.name] = node.role;
    return fixture;
}

} // namespace fwdnet::test
