#pragma once

#include "fwdnet/classify.hpp"
#include "fwdnet/community.hpp"
#include "fwdnet/ingest.hpp"
#include "fwdnet/layout.hpp"

#include <json.hpp>

#include <filesystem>

namespace fwdnet {

struct InputSpec {
    std::filesystem::path path;
    ExportFormat format = ExportFormat::Ndjson;
};

struct CommunityOptions {
    double resolution = 1.0;
    std::uint64_t seed = 0;
};

/// Full pipeline configuration. The anonymization key is never stored here:
/// anonymize_key_env names an environment variable read at run time, so
/// configs and manifests stay shareable.
struct RunConfig {
    std::vector<InputSpec> inputs;
    FieldMapping mapping;
    std::string anonymize_key_env;
    Weight min_frequency = 0; // graph-level frequency filter; 0 keeps everything
    std::uint64_t expansion_threshold = 50;
    RoleConfig roles;
    CommunityOptions community;
    LayoutParams layout;
    std::filesystem::path output_dir = "out";

    /// Throws Error{Config} on malformed or missing fields.
    static RunConfig from_json(const nlohmann::json& json);
    nlohmann::json to_json() const;
};

struct PipelineResult {
    nlohmann::json manifest;
    std::vector<std::filesystem::path> artifacts;
};

/// ingest -> anonymize -> filter -> expansion plan -> build -> frequency
/// filter -> metrics -> communities -> roles -> layout -> exports. Writes
/// expansion_plan.json, graph.gexf, graph.dot, key_users.csv, key_users.json,
/// metrics.csv and manifest.json into config.output_dir. Every artifact is a
/// deterministic function of (inputs, config, seeds). On a fatal error the
/// partially written artifacts are removed before the error propagates.
PipelineResult run_pipeline(const RunConfig& config);

/// Per-node metrics table as CSV, one row per node in id order.
void write_metrics_csv(const ForwardGraph& graph, const MetricsTable& metrics,
                       const Partition& partition, const std::filesystem::path& path);

nlohmann::json expansion_plan_json(const ExpansionPlan& plan);
nlohmann::json ingest_report_json(const IngestReport& report);

} // namespace fwdnet
