#include "fwdnet/pipeline.hpp"

#include "fwdnet/gexf.hpp"
#include "fwdnet/report.hpp"
#include "fwdnet/text.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <unordered_set>

namespace fwdnet {

namespace {

template <typename T>
T field_or(const nlohmann::json& json, const char* key, T fallback) {
    auto it = json.find(key);
    if (it == json.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::Config, std::string("config field '") + key + "' has the wrong type");
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::json& json) {
    if (!json.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
    RunConfig config;
    auto inputs_it = json.find("inputs");
    if (inputs_it != json.end()) {
        if (!inputs_it->is_array()) throw Error(ErrorKind::Config, "inputs must be an array");
        for (const auto& entry : *inputs_it) {
            InputSpec spec;
            if (entry.is_string()) {
                spec.path = entry.get<std::string>();
            } else if (entry.is_object()) {
                spec.path = field_or<std::string>(entry, "path", "");
                std::string format = field_or<std::string>(entry, "format", "ndjson");
                auto parsed = parse_export_format(format);
                if (!parsed) throw Error(ErrorKind::Config, "unknown input format: " + format);
                spec.format = *parsed;
            } else {
                throw Error(ErrorKind::Config, "inputs entries must be paths or objects");
            }
            if (spec.path.empty()) throw Error(ErrorKind::Config, "input without a path");
            config.inputs.push_back(std::move(spec));
        }
    }
    if (auto it = json.find("field_mapping"); it != json.end() && it->is_object()) {
        config.mapping.message_id = field_or<std::string>(*it, "message_id", config.mapping.message_id);
        config.mapping.chat = field_or<std::string>(*it, "chat", config.mapping.chat);
        config.mapping.chat_kind = field_or<std::string>(*it, "chat_kind", config.mapping.chat_kind);
        config.mapping.posted_at = field_or<std::string>(*it, "posted_at", config.mapping.posted_at);
        config.mapping.forward_source =
            field_or<std::string>(*it, "forward_source", config.mapping.forward_source);
        config.mapping.forward_source_kind =
            field_or<std::string>(*it, "forward_source_kind", config.mapping.forward_source_kind);
    }
    config.anonymize_key_env = field_or<std::string>(json, "anonymize_key_env", "");
    config.min_frequency = field_or<Weight>(json, "min_frequency", 0);
    config.expansion_threshold = field_or<std::uint64_t>(json, "expansion_threshold", 50);
    if (config.expansion_threshold < 1)
        throw Error(ErrorKind::Config, "expansion_threshold must be >= 1");
    if (auto it = json.find("roles"); it != json.end() && it->is_object()) {
        RoleConfig& r = config.roles;
        r.high_out_percentile = field_or<double>(*it, "high_out_percentile", r.high_out_percentile);
        r.high_in_percentile = field_or<double>(*it, "high_in_percentile", r.high_in_percentile);
        r.cs_max_ratio = field_or<double>(*it, "cs_max_ratio", r.cs_max_ratio);
        r.ae_min_ratio = field_or<double>(*it, "ae_min_ratio", r.ae_min_ratio);
        r.influencer_min_in = field_or<std::uint32_t>(*it, "influencer_min_in", r.influencer_min_in);
        r.min_frequency = field_or<Weight>(*it, "min_frequency", r.min_frequency);
        if (auto abs = it->find("absolute_high_out"); abs != it->end() && !abs->is_null())
            r.absolute_high_out = abs->get<std::uint32_t>();
        if (auto abs = it->find("absolute_high_in"); abs != it->end() && !abs->is_null())
            r.absolute_high_in = abs->get<std::uint32_t>();
    }
    try {
        config.roles.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
    }
    if (auto it = json.find("community"); it != json.end() && it->is_object()) {
        config.community.resolution = field_or<double>(*it, "resolution", 1.0);
        config.community.seed = field_or<std::uint64_t>(*it, "seed", 0);
    }
    if (auto it = json.find("layout"); it != json.end() && it->is_object()) {
        LayoutParams& l = config.layout;
        l.optimal_distance_scale =
            field_or<double>(*it, "optimal_distance_scale", l.optimal_distance_scale);
        l.relative_strength = field_or<double>(*it, "relative_strength", l.relative_strength);
        l.initial_step = field_or<double>(*it, "initial_step", l.initial_step);
        l.step_ratio = field_or<double>(*it, "step_ratio", l.step_ratio);
        l.barnes_hut_theta = field_or<double>(*it, "barnes_hut_theta", l.barnes_hut_theta);
        l.convergence_tolerance =
            field_or<double>(*it, "convergence_tolerance", l.convergence_tolerance);
        l.max_iterations = field_or<std::uint32_t>(*it, "max_iterations", l.max_iterations);
        l.seed = field_or<std::uint64_t>(*it, "seed", 0);
    }
    try {
        config.layout.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
    }
    config.output_dir = field_or<std::string>(json, "output_dir", "out");
    return config;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json inputs_json = nlohmann::json::array();
    for (const InputSpec& spec : inputs)
        inputs_json.push_back({{"path", spec.path.string()}, {"format", to_string(spec.format)}});
    nlohmann::json roles_json = {
        {"high_out_percentile", roles.high_out_percentile},
        {"high_in_percentile", roles.high_in_percentile},
        {"cs_max_ratio", roles.cs_max_ratio},
        {"ae_min_ratio", roles.ae_min_ratio},
        {"influencer_min_in", roles.influencer_min_in},
        {"min_frequency", roles.min_frequency},
        {"absolute_high_out",
         roles.absolute_high_out ? nlohmann::json(*roles.absolute_high_out) : nlohmann::json()},
        {"absolute_high_in",
         roles.absolute_high_in ? nlohmann::json(*roles.absolute_high_in) : nlohmann::json()},
    };
    return {
        {"inputs", inputs_json},
        {"field_mapping",
         {{"message_id", mapping.message_id},
          {"chat", mapping.chat},
          {"chat_kind", mapping.chat_kind},
          {"posted_at", mapping.posted_at},
          {"forward_source", mapping.forward_source},
          {"forward_source_kind", mapping.forward_source_kind}}},
        {"anonymize_key_env", anonymize_key_env},
        {"min_frequency", min_frequency},
        {"expansion_threshold", expansion_threshold},
        {"roles", roles_json},
        {"community", {{"resolution", community.resolution}, {"seed", community.seed}}},
        {"layout",
         {{"optimal_distance_scale", layout.optimal_distance_scale},
          {"relative_strength", layout.relative_strength},
          {"initial_step", layout.initial_step},
          {"step_ratio", layout.step_ratio},
          {"barnes_hut_theta", layout.barnes_hut_theta},
          {"convergence_tolerance", layout.convergence_tolerance},
          {"max_iterations", layout.max_iterations},
          {"seed", layout.seed}}},
        {"output_dir", output_dir.string()},
    };
}

nlohmann::json ingest_report_json(const IngestReport& report) {
    nlohmann::json reasons = nlohmann::json::object();
    for (const auto& [reason, count] : report.skip_reasons) reasons[reason] = count;
    return {
        {"records_read", report.records_read},
        {"records_forwarded", report.records_forwarded},
        {"records_non_forwarded", report.records_non_forwarded},
        {"sourceless_forwards", report.sourceless_forwards},
        {"records_skipped", report.records_skipped},
        {"skip_reasons", reasons},
        {"distinct_sources", report.distinct_sources},
    };
}

nlohmann::json expansion_plan_json(const ExpansionPlan& plan) {
    nlohmann::json candidates = nlohmann::json::array();
    for (const ExpansionCandidate& candidate : plan.candidates) {
        candidates.push_back({{"username", candidate.username},
                              {"kind", to_string(candidate.kind)},
                              {"occurrences", candidate.occurrences}});
    }
    return {{"threshold", plan.threshold}, {"candidates", candidates}};
}

void write_metrics_csv(const ForwardGraph& graph, const MetricsTable& metrics,
                       const Partition& partition, const std::filesystem::path& path) {
    if (metrics.rows.size() != graph.node_count() ||
        partition.assignment.size() != graph.node_count())
        throw Error(ErrorKind::InvalidArgument, "metrics csv inputs cover different node sets");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << "username,kind,f,in_degree,out_degree,weighted_in,weighted_out,betweenness,community\r\n";
    for (NodeId id = 0; id < graph.node_count(); ++id) {
        const NodeMetrics& row = metrics.rows[id];
        out << csv_field(graph.node(id).username) << ',' << to_string(graph.node(id).kind) << ','
            << row.frequency << ',' << row.in_degree << ',' << row.out_degree << ','
            << row.weighted_in << ',' << row.weighted_out << ','
            << format_double(row.betweenness) << ',' << partition.assignment[id] << "\r\n";
    }
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

PipelineResult run_pipeline(const RunConfig& config) {
    if (config.inputs.empty()) throw Error(ErrorKind::Config, "pipeline needs at least one input");

    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + config.output_dir.string());

    std::vector<std::filesystem::path> written;
    auto cleanup = [&]() {
        for (const auto& path : written) {
            std::error_code ignored;
            std::filesystem::remove(path, ignored);
        }
    };

    try {
        // ingest
        std::vector<ForwardRecord> records;
        IngestReport report;
        for (const InputSpec& input : config.inputs) {
            ParseResult parsed = parse_export(input.path, input.format, config.mapping);
            report.merge(parsed.report);
            records.insert(records.end(), std::make_move_iterator(parsed.records.begin()),
                           std::make_move_iterator(parsed.records.end()));
        }
        {
            std::unordered_set<std::string_view> sources;
            for (const ForwardRecord& record : records) {
                if (record.has_forward_source() && has_public_username(record.forward_source))
                    sources.insert(record.forward_source);
            }
            report.distinct_sources = sources.size();
        }

        // anonymize
        bool anonymized = false;
        std::uint64_t replaced = 0;
        if (!config.anonymize_key_env.empty()) {
            const char* key = std::getenv(config.anonymize_key_env.c_str());
            if (key == nullptr || *key == '\0')
                throw Error(ErrorKind::Config, "environment variable " + config.anonymize_key_env +
                                                   " is empty; cannot anonymize");
            EntityRegistry registry = EntityRegistry::from_records(records);
            std::unordered_set<std::string_view> users;
            for (const ForwardRecord& record : records) {
                if (record.has_forward_source() &&
                    registry.kind_of(record.forward_source) == EntityKind::User)
                    users.insert(record.forward_source);
                if (registry.kind_of(record.chat) == EntityKind::User) users.insert(record.chat);
            }
            replaced = users.size();
            records = anonymize(std::move(records),
                                {reinterpret_cast<const std::uint8_t*>(key), std::strlen(key)});
            anonymized = true;
        }

        // filter + expansion plan
        std::vector<ForwardRecord> forwarded = filter_forwarded(records);
        ExpansionPlan plan = expansion_candidates(records, config.expansion_threshold);
        const auto plan_path = config.output_dir / "expansion_plan.json";
        write_text_file(plan_path, expansion_plan_json(plan).dump(2) + "\n");
        written.push_back(plan_path);

        // build + frequency filter
        EntityRegistry registry = EntityRegistry::from_records(records);
        BuildResult built = build_graph(forwarded, registry);
        GraphStats full_stats{built.graph.node_count(), built.graph.edge_count(),
                              built.graph.total_weight()};
        ForwardGraph graph = config.min_frequency > 0
            ? filter_min_frequency(built.graph, config.min_frequency)
            : std::move(built.graph);

        // analyses; an empty graph short-circuits to empty results
        MetricsTable metrics = metrics_table(graph);
        Partition partition;
        Layout layout;
        if (graph.node_count() > 0) {
            partition = louvain(graph, config.community.resolution, config.community.seed);
            layout = yifan_hu(graph, config.layout);
        }
        std::vector<RoleAssignment> assignments = classify(graph, metrics, config.roles);

        // exports
        const auto gexf_path = config.output_dir / "graph.gexf";
        write_gexf(graph, metrics, partition, assignments, layout, gexf_path);
        written.push_back(gexf_path);

        const auto dot_path = config.output_dir / "graph.dot";
        write_dot(graph, assignments, dot_path);
        written.push_back(dot_path);

        std::vector<KeyUserRow> rows = key_user_rows(graph, metrics, partition, assignments);
        const auto csv_path = config.output_dir / "key_users.csv";
        write_report(rows, csv_path, ReportFormat::Csv);
        written.push_back(csv_path);
        const auto json_path = config.output_dir / "key_users.json";
        write_report(rows, json_path, ReportFormat::Json);
        written.push_back(json_path);

        const auto metrics_path = config.output_dir / "metrics.csv";
        write_metrics_csv(graph, metrics, partition, metrics_path);
        written.push_back(metrics_path);

        // manifest
        std::vector<NodeId> eligible = eligible_nodes(graph, metrics, config.roles);
        nlohmann::json role_counts = {
            {"conversation_starter", 0}, {"influencer", 0},        {"active_engager", 0},
            {"network_creator", 0},      {"information_bridge", 0}, {"none", 0},
        };
        for (const RoleAssignment& assignment : assignments)
            role_counts[role_name(assignment.role)] = role_counts[role_name(assignment.role)].get<std::uint64_t>() + 1;

        nlohmann::json manifest = {
            {"config", config.to_json()},
            {"seeds", {{"community", config.community.seed}, {"layout", config.layout.seed}}},
            {"stages",
             {{"ingest", ingest_report_json(report)},
              {"anonymize", {{"enabled", anonymized}, {"replaced_usernames", replaced}}},
              {"filter", {{"records_kept", forwarded.size()}}},
              {"expansion",
               {{"threshold", plan.threshold}, {"candidates", plan.candidates.size()}}},
              {"graph",
               {{"nodes", full_stats.node_count},
                {"edges", full_stats.edge_count},
                {"total_weight", full_stats.total_weight},
                {"records_skipped", built.tally.records_skipped}}},
              {"frequency_filter",
               {{"min_frequency", config.min_frequency},
                {"nodes", graph.node_count()},
                {"edges", graph.edge_count()},
                {"total_weight", graph.total_weight()}}},
              {"metrics", {{"rows", metrics.rows.size()}}},
              {"community",
               {{"communities", partition.community_count},
                {"modularity", partition.modularity},
                {"resolution", config.community.resolution}}},
              {"classify", {{"eligible", eligible.size()}, {"roles", role_counts}}},
              {"layout",
               {{"iterations", layout.iterations_used},
                {"final_energy", layout.final_energy}}}}},
        };
        nlohmann::json artifact_names = nlohmann::json::array();
        for (const auto& path : written) artifact_names.push_back(path.filename().string());
        artifact_names.push_back("manifest.json");
        manifest["artifacts"] = artifact_names;

        const auto manifest_path = config.output_dir / "manifest.json";
        write_text_file(manifest_path, manifest.dump(2) + "\n");
        written.push_back(manifest_path);

        return PipelineResult{std::move(manifest), std::move(written)};
    } catch (...) {
        cleanup();
        throw;
    }
}

} // namespace fwdnet
