// Command-line front end. Everything goes through the C API in
// fwdnet/fwdnet.h; this translation unit never touches the C++ core.

#include "fwdnet/fwdnet.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitConfig = 2;

int exit_code(fwdnet_status status) {
    if (status == FWDNET_OK) return kExitOk;
    if (status == FWDNET_ERR_CONFIG || status == FWDNET_ERR_INVALID_ARG) return kExitConfig;
    return kExitFatal;
}

[[noreturn]] void die(fwdnet_status status, const std::string& context) {
    std::cerr << "fwdnet: " << context << ": " << fwdnet_status_name(status);
    const char* detail = fwdnet_last_error();
    if (detail != nullptr && *detail != '\0') std::cerr << " (" << detail << ")";
    std::cerr << "\n";
    std::exit(exit_code(status));
}

void check(fwdnet_status status, const std::string& context) {
    if (status != FWDNET_OK) die(status, context);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) die(FWDNET_ERR_IO, "cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) die(FWDNET_ERR_IO, "cannot write " + path);
    out << text;
    if (!out) die(FWDNET_ERR_IO, "write failed: " + path);
}

struct OwnedString {
    char* value = nullptr;
    ~OwnedString() { fwdnet_string_free(value); }
    std::string str() const { return value != nullptr ? std::string(value) : std::string(); }
};

struct DatasetHandle {
    fwdnet_dataset* value = nullptr;
    ~DatasetHandle() { fwdnet_dataset_free(value); }
};

struct GraphHandle {
    fwdnet_graph* value = nullptr;
    ~GraphHandle() { fwdnet_graph_free(value); }
};

struct AnalysisHandle {
    fwdnet_analysis* value = nullptr;
    ~AnalysisHandle() { fwdnet_analysis_free(value); }
};

// Options shared by the data-consuming subcommands.
struct InputOptions {
    std::vector<std::string> inputs;
    std::string format = "ndjson";
    std::string mapping_path;
    std::string anonymize_key_env;
    bool keep_forwarded = false;
};

void add_input_options(CLI::App& cmd, InputOptions& options) {
    cmd.add_option("-i,--input", options.inputs, "input export file")->required();
    cmd.add_option("--format", options.format, "input format: ndjson or csv");
    cmd.add_option("--mapping", options.mapping_path,
                   "JSON file mapping canonical field names to export columns");
    cmd.add_option("--anonymize-key-env", options.anonymize_key_env,
                   "environment variable holding the anonymization key");
}

// Opens all inputs as one dataset by concatenating records. The C API works
// on one file per dataset, so multiple inputs are merged through a temporary
// canonical NDJSON round-trip only when needed; the common case is one file.
fwdnet_dataset* open_dataset(const InputOptions& options) {
    std::string mapping_json;
    if (!options.mapping_path.empty()) mapping_json = read_file(options.mapping_path);

    if (options.inputs.size() != 1) {
        die(FWDNET_ERR_CONFIG,
            "subcommands take exactly one --input; use `pipeline` for multi-file runs");
    }
    fwdnet_dataset* dataset = nullptr;
    check(fwdnet_dataset_open(options.inputs.front().c_str(), options.format.c_str(),
                              mapping_json.empty() ? nullptr : mapping_json.c_str(), &dataset),
          "opening " + options.inputs.front());

    if (!options.anonymize_key_env.empty()) {
        const char* key = std::getenv(options.anonymize_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            fwdnet_dataset_free(dataset);
            die(FWDNET_ERR_CONFIG,
                "environment variable " + options.anonymize_key_env + " is empty");
        }
        fwdnet_status status = fwdnet_dataset_anonymize(
            dataset, reinterpret_cast<const uint8_t*>(key), std::strlen(key));
        if (status != FWDNET_OK) {
            fwdnet_dataset_free(dataset);
            die(status, "anonymizing");
        }
    }
    if (options.keep_forwarded) check(fwdnet_dataset_keep_forwarded(dataset), "filtering");
    return dataset;
}

struct AnalysisOptions {
    uint64_t min_frequency = 0;
    double resolution = 1.0;
    uint64_t community_seed = 0;
    uint64_t layout_seed = 0;
    double role_high_out_percentile = 0.75;
    double role_high_in_percentile = 0.75;
    double role_cs_max_ratio = 0.15;
    double role_ae_min_ratio = 4.0;
    uint32_t role_influencer_min_in = 5;
    uint64_t role_min_frequency = 50;
    int64_t role_absolute_high_out = -1;
    int64_t role_absolute_high_in = -1;
    uint32_t layout_max_iterations = 1000;
    bool with_layout = true;
};

void add_analysis_options(CLI::App& cmd, AnalysisOptions& options, bool with_layout_flags) {
    cmd.add_option("--min-frequency", options.min_frequency,
                   "drop nodes with frequency below this before analysis");
    cmd.add_option("--resolution", options.resolution, "community resolution");
    cmd.add_option("--community-seed", options.community_seed, "community detection seed");
    cmd.add_option("--high-out-percentile", options.role_high_out_percentile,
                   "percentile defining a high out-degree");
    cmd.add_option("--high-in-percentile", options.role_high_in_percentile,
                   "percentile defining a high in-degree");
    cmd.add_option("--cs-max-ratio", options.role_cs_max_ratio,
                   "in/out ratio ceiling for conversation starters");
    cmd.add_option("--ae-min-ratio", options.role_ae_min_ratio,
                   "in/out ratio floor for active engagers");
    cmd.add_option("--influencer-min-in", options.role_influencer_min_in,
                   "minimum in-degree for influencers");
    cmd.add_option("--role-min-frequency", options.role_min_frequency,
                   "minimum frequency for role eligibility");
    cmd.add_option("--absolute-high-out", options.role_absolute_high_out,
                   "absolute high out-degree threshold (overrides the percentile)");
    cmd.add_option("--absolute-high-in", options.role_absolute_high_in,
                   "absolute high in-degree threshold (overrides the percentile)");
    if (with_layout_flags)
        cmd.add_option("--layout-seed", options.layout_seed, "layout seed");
    if (with_layout_flags)
        cmd.add_option("--layout-max-iterations", options.layout_max_iterations,
                       "layout iteration cap");
}

std::string analysis_options_json(const AnalysisOptions& options) {
    nlohmann::json roles = {
        {"high_out_percentile", options.role_high_out_percentile},
        {"high_in_percentile", options.role_high_in_percentile},
        {"cs_max_ratio", options.role_cs_max_ratio},
        {"ae_min_ratio", options.role_ae_min_ratio},
        {"influencer_min_in", options.role_influencer_min_in},
        {"min_frequency", options.role_min_frequency},
    };
    if (options.role_absolute_high_out >= 0)
        roles["absolute_high_out"] = options.role_absolute_high_out;
    if (options.role_absolute_high_in >= 0)
        roles["absolute_high_in"] = options.role_absolute_high_in;
    nlohmann::json document = {
        {"community", {{"resolution", options.resolution}, {"seed", options.community_seed}}},
        {"roles", roles},
        {"layout",
         {{"seed", options.layout_seed}, {"max_iterations", options.layout_max_iterations}}},
        {"with_layout", options.with_layout},
    };
    return document.dump();
}

fwdnet_analysis* analyze(const InputOptions& input, const AnalysisOptions& options) {
    DatasetHandle dataset{open_dataset(input)};
    check(fwdnet_dataset_keep_forwarded(dataset.value), "filtering");
    GraphHandle graph;
    check(fwdnet_graph_build(dataset.value, &graph.value), "building graph");
    if (options.min_frequency > 0) {
        GraphHandle filtered;
        check(fwdnet_graph_filter_min_frequency(graph.value, options.min_frequency,
                                                &filtered.value),
              "filtering graph");
        std::swap(graph.value, filtered.value);
    }
    fwdnet_analysis* analysis = nullptr;
    check(fwdnet_analyze(graph.value, analysis_options_json(options).c_str(), &analysis),
          "analyzing");
    return analysis;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"forwarded-message network analysis"};
    app.require_subcommand(1);

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "parse an export into canonical records");
    InputOptions ingest_input;
    add_input_options(*ingest_cmd, ingest_input);
    ingest_cmd->add_flag("--filter-forwarded", ingest_input.keep_forwarded,
                         "keep only publicly attributed forwards");
    std::string ingest_out, ingest_report;
    ingest_cmd->add_option("-o,--output", ingest_out, "canonical NDJSON output")->required();
    ingest_cmd->add_option("--report", ingest_report, "ingest report JSON output");

    // expand
    auto* expand_cmd = app.add_subcommand("expand", "plan the second collection wave");
    InputOptions expand_input;
    add_input_options(*expand_cmd, expand_input);
    uint64_t expand_threshold = 50;
    std::string expand_out;
    expand_cmd->add_option("--threshold", expand_threshold, "minimum source occurrences");
    expand_cmd->add_option("-o,--output", expand_out, "expansion plan JSON output")->required();

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "metrics and communities");
    InputOptions analyze_input;
    AnalysisOptions analyze_options;
    add_input_options(*analyze_cmd, analyze_input);
    add_analysis_options(*analyze_cmd, analyze_options, false);
    std::string analyze_metrics_out, analyze_summary_out;
    analyze_cmd->add_option("-o,--output", analyze_metrics_out, "metrics CSV output")->required();
    analyze_cmd->add_option("--summary", analyze_summary_out, "summary JSON output");

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "key-user roles");
    InputOptions classify_input;
    AnalysisOptions classify_options;
    add_input_options(*classify_cmd, classify_input);
    add_analysis_options(*classify_cmd, classify_options, false);
    std::string classify_out, classify_json_out;
    classify_cmd->add_option("-o,--output", classify_out, "key-user report CSV output")->required();
    classify_cmd->add_option("--json", classify_json_out, "key-user report JSON output");

    // layout
    auto* layout_cmd = app.add_subcommand("layout", "force-directed coordinates");
    InputOptions layout_input;
    AnalysisOptions layout_options;
    add_input_options(*layout_cmd, layout_input);
    add_analysis_options(*layout_cmd, layout_options, true);
    std::string layout_out;
    layout_cmd->add_option("-o,--output", layout_out, "layout JSON output")->required();

    // export
    auto* export_cmd = app.add_subcommand("export", "GEXF and DOT files");
    InputOptions export_input;
    AnalysisOptions export_options;
    add_input_options(*export_cmd, export_input);
    add_analysis_options(*export_cmd, export_options, true);
    std::string export_gexf, export_dot;
    export_cmd->add_option("--gexf", export_gexf, "GEXF output path");
    export_cmd->add_option("--dot", export_dot, "DOT output path");

    // pipeline
    auto* pipeline_cmd = app.add_subcommand("pipeline", "run every stage from a config");
    std::string pipeline_config_path;
    std::vector<std::string> pipeline_inputs;
    std::string pipeline_format, pipeline_mapping, pipeline_output_dir, pipeline_key_env,
        pipeline_manifest_out;
    int64_t pipeline_min_frequency = -1, pipeline_threshold = -1;
    int64_t pipeline_community_seed = -1, pipeline_layout_seed = -1;
    int64_t pipeline_layout_iterations = -1;
    int64_t pipeline_influencer_min_in = -1, pipeline_role_min_frequency = -1;
    int64_t pipeline_absolute_high_out = -1, pipeline_absolute_high_in = -1;
    double pipeline_resolution = -1.0;
    double pipeline_high_out = -1.0, pipeline_high_in = -1.0;
    double pipeline_cs_max = -1.0, pipeline_ae_min = -1.0;
    pipeline_cmd->add_option("--config", pipeline_config_path, "run config JSON file");
    pipeline_cmd->add_option("-i,--input", pipeline_inputs, "input export file (overrides config)");
    pipeline_cmd->add_option("--format", pipeline_format, "format for --input files");
    pipeline_cmd->add_option("--mapping", pipeline_mapping,
                             "JSON file mapping canonical field names to export columns");
    pipeline_cmd->add_option("--output-dir", pipeline_output_dir, "artifact directory");
    pipeline_cmd->add_option("--anonymize-key-env", pipeline_key_env,
                             "environment variable holding the anonymization key");
    pipeline_cmd->add_option("--min-frequency", pipeline_min_frequency,
                             "graph-level frequency filter");
    pipeline_cmd->add_option("--expansion-threshold", pipeline_threshold,
                             "expansion plan threshold");
    pipeline_cmd->add_option("--community-seed", pipeline_community_seed, "community seed");
    pipeline_cmd->add_option("--layout-seed", pipeline_layout_seed, "layout seed");
    pipeline_cmd->add_option("--layout-max-iterations", pipeline_layout_iterations,
                             "layout iteration cap");
    pipeline_cmd->add_option("--resolution", pipeline_resolution, "community resolution");
    pipeline_cmd->add_option("--high-out-percentile", pipeline_high_out,
                             "percentile defining a high out-degree");
    pipeline_cmd->add_option("--high-in-percentile", pipeline_high_in,
                             "percentile defining a high in-degree");
    pipeline_cmd->add_option("--cs-max-ratio", pipeline_cs_max,
                             "in/out ratio ceiling for conversation starters");
    pipeline_cmd->add_option("--ae-min-ratio", pipeline_ae_min,
                             "in/out ratio floor for active engagers");
    pipeline_cmd->add_option("--influencer-min-in", pipeline_influencer_min_in,
                             "minimum in-degree for influencers");
    pipeline_cmd->add_option("--role-min-frequency", pipeline_role_min_frequency,
                             "minimum frequency for role eligibility");
    pipeline_cmd->add_option("--absolute-high-out", pipeline_absolute_high_out,
                             "absolute high out-degree threshold");
    pipeline_cmd->add_option("--absolute-high-in", pipeline_absolute_high_in,
                             "absolute high in-degree threshold");
    pipeline_cmd->add_option("--manifest", pipeline_manifest_out,
                             "also write the manifest to this path ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (ingest_cmd->parsed()) {
        DatasetHandle dataset{open_dataset(ingest_input)};
        check(fwdnet_dataset_write_ndjson(dataset.value, ingest_out.c_str()), "writing records");
        if (!ingest_report.empty()) {
            OwnedString report;
            check(fwdnet_dataset_report_json(dataset.value, &report.value), "building report");
            write_file(ingest_report, report.str() + "\n");
        }
        return kExitOk;
    }

    if (expand_cmd->parsed()) {
        DatasetHandle dataset{open_dataset(expand_input)};
        OwnedString plan;
        check(fwdnet_dataset_expansion_plan_json(dataset.value, expand_threshold, &plan.value),
              "planning expansion");
        write_file(expand_out, plan.str() + "\n");
        return kExitOk;
    }

    if (analyze_cmd->parsed()) {
        analyze_options.with_layout = false;
        AnalysisHandle analysis{analyze(analyze_input, analyze_options)};
        check(fwdnet_analysis_write_metrics_csv(analysis.value, analyze_metrics_out.c_str()),
              "writing metrics");
        if (!analyze_summary_out.empty()) {
            OwnedString summary;
            check(fwdnet_analysis_summary_json(analysis.value, &summary.value),
                  "building summary");
            write_file(analyze_summary_out, summary.str() + "\n");
        }
        return kExitOk;
    }

    if (classify_cmd->parsed()) {
        classify_options.with_layout = false;
        AnalysisHandle analysis{analyze(classify_input, classify_options)};
        check(fwdnet_analysis_write_report(analysis.value, classify_out.c_str(), "csv"),
              "writing report");
        if (!classify_json_out.empty())
            check(fwdnet_analysis_write_report(analysis.value, classify_json_out.c_str(), "json"),
                  "writing report");
        return kExitOk;
    }

    if (layout_cmd->parsed()) {
        AnalysisHandle analysis{analyze(layout_input, layout_options)};
        OwnedString coords;
        check(fwdnet_analysis_layout_json(analysis.value, &coords.value), "building layout");
        write_file(layout_out, coords.str() + "\n");
        return kExitOk;
    }

    if (export_cmd->parsed()) {
        if (export_gexf.empty() && export_dot.empty()) {
            std::cerr << "fwdnet: export needs --gexf and/or --dot\n";
            return kExitConfig;
        }
        AnalysisHandle analysis{analyze(export_input, export_options)};
        if (!export_gexf.empty())
            check(fwdnet_analysis_write_gexf(analysis.value, export_gexf.c_str()),
                  "writing gexf");
        if (!export_dot.empty())
            check(fwdnet_analysis_write_dot(analysis.value, export_dot.c_str()), "writing dot");
        return kExitOk;
    }

    if (pipeline_cmd->parsed()) {
        nlohmann::json config = nlohmann::json::object();
        if (!pipeline_config_path.empty()) {
            config = nlohmann::json::parse(read_file(pipeline_config_path), nullptr, false);
            if (config.is_discarded()) {
                std::cerr << "fwdnet: malformed config JSON: " << pipeline_config_path << "\n";
                return kExitConfig;
            }
        }
        // flags override file values
        if (!pipeline_inputs.empty()) {
            nlohmann::json inputs = nlohmann::json::array();
            for (const std::string& path : pipeline_inputs) {
                inputs.push_back(
                    {{"path", path},
                     {"format", pipeline_format.empty() ? "ndjson" : pipeline_format}});
            }
            config["inputs"] = inputs;
        }
        if (!pipeline_mapping.empty()) {
            nlohmann::json mapping = nlohmann::json::parse(read_file(pipeline_mapping), nullptr,
                                                           false);
            if (mapping.is_discarded()) {
                std::cerr << "fwdnet: malformed mapping JSON: " << pipeline_mapping << "\n";
                return kExitConfig;
            }
            config["field_mapping"] = mapping;
        }
        if (!pipeline_output_dir.empty()) config["output_dir"] = pipeline_output_dir;
        if (!pipeline_key_env.empty()) config["anonymize_key_env"] = pipeline_key_env;
        if (pipeline_min_frequency >= 0) config["min_frequency"] = pipeline_min_frequency;
        if (pipeline_threshold >= 0) config["expansion_threshold"] = pipeline_threshold;
        if (pipeline_resolution >= 0) config["community"]["resolution"] = pipeline_resolution;
        if (pipeline_community_seed >= 0) config["community"]["seed"] = pipeline_community_seed;
        if (pipeline_layout_seed >= 0) config["layout"]["seed"] = pipeline_layout_seed;
        if (pipeline_layout_iterations >= 0)
            config["layout"]["max_iterations"] = pipeline_layout_iterations;
        if (pipeline_high_out >= 0) config["roles"]["high_out_percentile"] = pipeline_high_out;
        if (pipeline_high_in >= 0) config["roles"]["high_in_percentile"] = pipeline_high_in;
        if (pipeline_cs_max >= 0) config["roles"]["cs_max_ratio"] = pipeline_cs_max;
        if (pipeline_ae_min >= 0) config["roles"]["ae_min_ratio"] = pipeline_ae_min;
        if (pipeline_influencer_min_in >= 0)
            config["roles"]["influencer_min_in"] = pipeline_influencer_min_in;
        if (pipeline_role_min_frequency >= 0)
            config["roles"]["min_frequency"] = pipeline_role_min_frequency;
        if (pipeline_absolute_high_out >= 0)
            config["roles"]["absolute_high_out"] = pipeline_absolute_high_out;
        if (pipeline_absolute_high_in >= 0)
            config["roles"]["absolute_high_in"] = pipeline_absolute_high_in;

        OwnedString manifest;
        check(fwdnet_run_pipeline(config.dump().c_str(), &manifest.value), "pipeline");
        if (!pipeline_manifest_out.empty()) write_file(pipeline_manifest_out, manifest.str() + "\n");
        return kExitOk;
    }

    return kExitConfig;
}
