#include "fwdnet/fwdnet.h"

#include "fwdnet/gexf.hpp"
#include "fwdnet/pipeline.hpp"
#include "fwdnet/report.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <fstream>

using namespace fwdnet;

struct fwdnet_dataset {
    std::vector<ForwardRecord> records;
    IngestReport report;
};

struct fwdnet_graph {
    ForwardGraph graph;
    BuildTally tally;
};

struct fwdnet_analysis {
    ForwardGraph graph;
    MetricsTable metrics;
    Partition partition;
    std::vector<RoleAssignment> roles;
    Layout layout;
    RoleConfig role_config;
};

namespace {

thread_local std::string g_last_error;

fwdnet_status status_of(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return FWDNET_ERR_INVALID_ARG;
    case ErrorKind::Io: return FWDNET_ERR_IO;
    case ErrorKind::Parse: return FWDNET_ERR_PARSE;
    case ErrorKind::Config: return FWDNET_ERR_CONFIG;
    case ErrorKind::State: return FWDNET_ERR_STATE;
    }
    return FWDNET_ERR_STATE;
}

template <typename Fn>
fwdnet_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return FWDNET_OK;
    } catch (const Error& error) {
        g_last_error = error.what();
        return status_of(error.kind());
    } catch (const std::exception& error) {
        g_last_error = error.what();
        return FWDNET_ERR_STATE;
    }
}

fwdnet_status invalid(const char* message) {
    g_last_error = message;
    return FWDNET_ERR_INVALID_ARG;
}

char* copy_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out != nullptr) std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

nlohmann::json parse_json_argument(const char* text, const char* what) {
    if (text == nullptr || *text == '\0') return nlohmann::json::object();
    nlohmann::json parsed = nlohmann::json::parse(text, nullptr, false);
    if (parsed.is_discarded())
        throw Error(ErrorKind::Config, std::string("malformed JSON in ") + what);
    return parsed;
}

FieldMapping mapping_from_json(const nlohmann::json& json) {
    FieldMapping mapping;
    auto pick = [&](const char* key, std::string& field) {
        auto it = json.find(key);
        if (it != json.end() && it->is_string()) field = it->get<std::string>();
    };
    pick("message_id", mapping.message_id);
    pick("chat", mapping.chat);
    pick("chat_kind", mapping.chat_kind);
    pick("posted_at", mapping.posted_at);
    pick("forward_source", mapping.forward_source);
    pick("forward_source_kind", mapping.forward_source_kind);
    return mapping;
}

nlohmann::json record_to_json(const ForwardRecord& record) {
    nlohmann::json out = {
        {"message_id", record.message_id},
        {"chat", record.chat},
        {"chat_kind", to_string(record.chat_kind)},
        {"posted_at", record.posted_at},
    };
    if (record.has_forward_source()) {
        out["forward_source"] = record.forward_source;
        out["forward_source_kind"] = to_string(record.forward_source_kind);
    }
    return out;
}

} // namespace

extern "C" {

const char* fwdnet_status_name(fwdnet_status status) {
    switch (status) {
    case FWDNET_OK: return "ok";
    case FWDNET_ERR_INVALID_ARG: return "invalid argument";
    case FWDNET_ERR_IO: return "io error";
    case FWDNET_ERR_PARSE: return "parse error";
    case FWDNET_ERR_CONFIG: return "config error";
    case FWDNET_ERR_STATE: return "state error";
    }
    return "unknown";
}

const char* fwdnet_last_error(void) { return g_last_error.c_str(); }

void fwdnet_string_free(char* text) { std::free(text); }

fwdnet_status fwdnet_dataset_open(const char* path, const char* format, const char* mapping_json,
                                  fwdnet_dataset** out) {
    if (path == nullptr || format == nullptr || out == nullptr)
        return invalid("fwdnet_dataset_open: path, format and out are required");
    *out = nullptr;
    return guarded([&] {
        auto parsed_format = parse_export_format(format);
        if (!parsed_format)
            throw Error(ErrorKind::InvalidArgument, std::string("unknown format: ") + format);
        FieldMapping mapping = mapping_from_json(parse_json_argument(mapping_json, "mapping"));
        ParseResult result = parse_export(std::filesystem::path(path), *parsed_format, mapping);
        *out = new fwdnet_dataset{std::move(result.records), std::move(result.report)};
    });
}

void fwdnet_dataset_free(fwdnet_dataset* dataset) { delete dataset; }

size_t fwdnet_dataset_record_count(const fwdnet_dataset* dataset) {
    return dataset != nullptr ? dataset->records.size() : 0;
}

fwdnet_status fwdnet_dataset_anonymize(fwdnet_dataset* dataset, const uint8_t* key,
                                       size_t key_len) {
    if (dataset == nullptr) return invalid("fwdnet_dataset_anonymize: dataset is required");
    if (key == nullptr || key_len == 0)
        return invalid("fwdnet_dataset_anonymize: key must not be empty");
    return guarded([&] { dataset->records = anonymize(std::move(dataset->records), {key, key_len}); });
}

fwdnet_status fwdnet_dataset_keep_forwarded(fwdnet_dataset* dataset) {
    if (dataset == nullptr) return invalid("fwdnet_dataset_keep_forwarded: dataset is required");
    return guarded([&] { dataset->records = filter_forwarded(dataset->records); });
}

fwdnet_status fwdnet_dataset_report_json(const fwdnet_dataset* dataset, char** out_json) {
    if (dataset == nullptr || out_json == nullptr)
        return invalid("fwdnet_dataset_report_json: dataset and out_json are required");
    return guarded([&] { *out_json = copy_string(ingest_report_json(dataset->report).dump(2)); });
}

fwdnet_status fwdnet_dataset_expansion_plan_json(const fwdnet_dataset* dataset, uint64_t threshold,
                                                 char** out_json) {
    if (dataset == nullptr || out_json == nullptr)
        return invalid("fwdnet_dataset_expansion_plan_json: dataset and out_json are required");
    return guarded([&] {
        ExpansionPlan plan = expansion_candidates(dataset->records, threshold);
        *out_json = copy_string(expansion_plan_json(plan).dump(2));
    });
}

fwdnet_status fwdnet_dataset_write_ndjson(const fwdnet_dataset* dataset, const char* path) {
    if (dataset == nullptr || path == nullptr)
        return invalid("fwdnet_dataset_write_ndjson: dataset and path are required");
    return guarded([&] {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, std::string("cannot write ") + path);
        for (const ForwardRecord& record : dataset->records)
            out << record_to_json(record).dump() << '\n';
        if (!out) throw Error(ErrorKind::Io, std::string("write failed: ") + path);
    });
}

fwdnet_status fwdnet_graph_build(const fwdnet_dataset* dataset, fwdnet_graph** out) {
    if (dataset == nullptr || out == nullptr)
        return invalid("fwdnet_graph_build: dataset and out are required");
    *out = nullptr;
    return guarded([&] {
        EntityRegistry registry = EntityRegistry::from_records(dataset->records);
        BuildResult built = build_graph(dataset->records, registry);
        *out = new fwdnet_graph{std::move(built.graph), std::move(built.tally)};
    });
}

fwdnet_status fwdnet_graph_filter_min_frequency(const fwdnet_graph* graph, uint64_t min_frequency,
                                                fwdnet_graph** out) {
    if (graph == nullptr || out == nullptr)
        return invalid("fwdnet_graph_filter_min_frequency: graph and out are required");
    *out = nullptr;
    return guarded([&] {
        *out = new fwdnet_graph{filter_min_frequency(graph->graph, min_frequency), {}};
    });
}

void fwdnet_graph_free(fwdnet_graph* graph) { delete graph; }

size_t fwdnet_graph_node_count(const fwdnet_graph* graph) {
    return graph != nullptr ? graph->graph.node_count() : 0;
}

size_t fwdnet_graph_edge_count(const fwdnet_graph* graph) {
    return graph != nullptr ? graph->graph.edge_count() : 0;
}

uint64_t fwdnet_graph_total_weight(const fwdnet_graph* graph) {
    return graph != nullptr ? graph->graph.total_weight() : 0;
}

fwdnet_status fwdnet_analyze(const fwdnet_graph* graph, const char* options_json,
                             fwdnet_analysis** out) {
    if (graph == nullptr || out == nullptr)
        return invalid("fwdnet_analyze: graph and out are required");
    *out = nullptr;
    return guarded([&] {
        nlohmann::json options = parse_json_argument(options_json, "analysis options");
        // reuse the run-config parser for the shared sections
        nlohmann::json config_json = nlohmann::json::object();
        for (const char* key : {"roles", "community", "layout"}) {
            if (options.contains(key)) config_json[key] = options[key];
        }
        RunConfig defaults = RunConfig::from_json(config_json);

        bool with_layout = true;
        if (auto it = options.find("with_layout"); it != options.end() && it->is_boolean())
            with_layout = it->get<bool>();

        auto analysis = std::make_unique<fwdnet_analysis>();
        analysis->graph = graph->graph;
        analysis->role_config = defaults.roles;
        analysis->metrics = metrics_table(analysis->graph);
        analysis->layout.coordinates.assign(analysis->graph.node_count(), Vec2{});
        if (analysis->graph.node_count() > 0) {
            analysis->partition = louvain(analysis->graph, defaults.community.resolution,
                                          defaults.community.seed);
            if (with_layout) analysis->layout = yifan_hu(analysis->graph, defaults.layout);
        }
        analysis->roles = classify(analysis->graph, analysis->metrics, defaults.roles);
        *out = analysis.release();
    });
}

void fwdnet_analysis_free(fwdnet_analysis* analysis) { delete analysis; }

fwdnet_status fwdnet_analysis_write_gexf(const fwdnet_analysis* analysis, const char* path) {
    if (analysis == nullptr || path == nullptr)
        return invalid("fwdnet_analysis_write_gexf: analysis and path are required");
    return guarded([&] {
        write_gexf(analysis->graph, analysis->metrics, analysis->partition, analysis->roles,
                   analysis->layout, std::filesystem::path(path));
    });
}

fwdnet_status fwdnet_analysis_write_dot(const fwdnet_analysis* analysis, const char* path) {
    if (analysis == nullptr || path == nullptr)
        return invalid("fwdnet_analysis_write_dot: analysis and path are required");
    return guarded(
        [&] { write_dot(analysis->graph, analysis->roles, std::filesystem::path(path)); });
}

fwdnet_status fwdnet_analysis_write_report(const fwdnet_analysis* analysis, const char* path,
                                           const char* format) {
    if (analysis == nullptr || path == nullptr || format == nullptr)
        return invalid("fwdnet_analysis_write_report: analysis, path and format are required");
    return guarded([&] {
        auto parsed = parse_report_format(format);
        if (!parsed)
            throw Error(ErrorKind::InvalidArgument, std::string("unknown report format: ") + format);
        std::vector<KeyUserRow> rows =
            key_user_rows(analysis->graph, analysis->metrics, analysis->partition, analysis->roles);
        write_report(rows, std::filesystem::path(path), *parsed);
    });
}

fwdnet_status fwdnet_analysis_write_metrics_csv(const fwdnet_analysis* analysis,
                                                const char* path) {
    if (analysis == nullptr || path == nullptr)
        return invalid("fwdnet_analysis_write_metrics_csv: analysis and path are required");
    return guarded([&] {
        write_metrics_csv(analysis->graph, analysis->metrics, analysis->partition,
                          std::filesystem::path(path));
    });
}

fwdnet_status fwdnet_analysis_layout_json(const fwdnet_analysis* analysis, char** out_json) {
    if (analysis == nullptr || out_json == nullptr)
        return invalid("fwdnet_analysis_layout_json: analysis and out_json are required");
    return guarded([&] {
        nlohmann::json coords = nlohmann::json::object();
        for (NodeId id = 0; id < analysis->graph.node_count(); ++id) {
            coords[analysis->graph.node(id).username] = {analysis->layout.coordinates[id].x,
                                                         analysis->layout.coordinates[id].y};
        }
        nlohmann::json document = {{"coordinates", coords},
                                   {"iterations", analysis->layout.iterations_used},
                                   {"final_energy", analysis->layout.final_energy}};
        *out_json = copy_string(document.dump(2));
    });
}

fwdnet_status fwdnet_analysis_summary_json(const fwdnet_analysis* analysis, char** out_json) {
    if (analysis == nullptr || out_json == nullptr)
        return invalid("fwdnet_analysis_summary_json: analysis and out_json are required");
    return guarded([&] {
        nlohmann::json roles = {
            {"conversation_starter", 0}, {"influencer", 0},         {"active_engager", 0},
            {"network_creator", 0},      {"information_bridge", 0}, {"none", 0},
        };
        for (const RoleAssignment& assignment : analysis->roles) {
            const char* name = role_name(assignment.role);
            roles[name] = roles[name].get<std::uint64_t>() + 1;
        }
        std::vector<NodeId> eligible =
            eligible_nodes(analysis->graph, analysis->metrics, analysis->role_config);
        nlohmann::json summary = {
            {"nodes", analysis->metrics.stats.node_count},
            {"edges", analysis->metrics.stats.edge_count},
            {"total_weight", analysis->metrics.stats.total_weight},
            {"communities", analysis->partition.community_count},
            {"modularity", analysis->partition.modularity},
            {"eligible", eligible.size()},
            {"roles", roles},
        };
        *out_json = copy_string(summary.dump(2));
    });
}

fwdnet_status fwdnet_run_pipeline(const char* config_json, char** out_manifest_json) {
    if (config_json == nullptr) return invalid("fwdnet_run_pipeline: config_json is required");
    if (out_manifest_json != nullptr) *out_manifest_json = nullptr;
    return guarded([&] {
        nlohmann::json parsed = nlohmann::json::parse(config_json, nullptr, false);
        if (parsed.is_discarded()) throw Error(ErrorKind::Config, "malformed config JSON");
        RunConfig config = RunConfig::from_json(parsed);
        PipelineResult result = run_pipeline(config);
        if (out_manifest_json != nullptr)
            *out_manifest_json = copy_string(result.manifest.dump(2));
    });
}

} // extern "C"
