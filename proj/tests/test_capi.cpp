#include "fwdnet/fwdnet.h"

#include "support/corpus.hpp"
#include "support/tempdir.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <string>

using namespace fwdnet::test;

namespace {

void write_sample(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    for (int i = 0; i < 60; ++i)
        lines.push_back("{\"chat\":\"grp\",\"chat_kind\":\"group\",\"forward_source\":\"chan_a\","
                        "\"forward_source_kind\":\"channel\"}");
    for (int i = 0; i < 52; ++i)
        lines.push_back("{\"chat\":\"grp2\",\"chat_kind\":\"group\",\"forward_source\":\"chan_a\","
                        "\"forward_source_kind\":\"channel\"}");
    for (int i = 0; i < 51; ++i)
        lines.push_back("{\"chat\":\"grp\",\"chat_kind\":\"group\",\"forward_source\":\"carol\","
                        "\"forward_source_kind\":\"user\"}");
    lines.push_back("{\"chat\":\"grp\",\"chat_kind\":\"group\"}");
    write_lines(path, lines);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

} // namespace

TEST_CASE("the c api drives the full flow with owned handles") {
    TempDir dir("capi");
    write_sample(dir.file("input.ndjson"));

    fwdnet_dataset* dataset = nullptr;
    REQUIRE(fwdnet_dataset_open(dir.file("input.ndjson").string().c_str(), "ndjson", nullptr,
                                &dataset) == FWDNET_OK);
    CHECK(fwdnet_dataset_record_count(dataset) == 164);

    const char* key = "api-secret";
    REQUIRE(fwdnet_dataset_anonymize(dataset, reinterpret_cast<const uint8_t*>(key),
                                     std::strlen(key)) == FWDNET_OK);

    char* report_json = nullptr;
    REQUIRE(fwdnet_dataset_report_json(dataset, &report_json) == FWDNET_OK);
    {
        nlohmann::json report = nlohmann::json::parse(report_json);
        CHECK(report.at("records_read") == 164);
        CHECK(report.at("records_forwarded") == 163);
        CHECK(report.at("distinct_sources") == 2);
    }
    fwdnet_string_free(report_json);

    char* plan_json = nullptr;
    REQUIRE(fwdnet_dataset_expansion_plan_json(dataset, 50, &plan_json) == FWDNET_OK);
    {
        nlohmann::json plan = nlohmann::json::parse(plan_json);
        CHECK(plan.at("candidates").size() == 2); // chan_a at 112, the pseudonym at 51
    }
    fwdnet_string_free(plan_json);

    REQUIRE(fwdnet_dataset_write_ndjson(dataset, dir.file("canonical.ndjson").string().c_str()) ==
            FWDNET_OK);
    const std::string canonical = slurp(dir.file("canonical.ndjson"));
    CHECK(canonical.find("carol") == std::string::npos); // anonymized away

    REQUIRE(fwdnet_dataset_keep_forwarded(dataset) == FWDNET_OK);
    CHECK(fwdnet_dataset_record_count(dataset) == 163);

    fwdnet_graph* graph = nullptr;
    REQUIRE(fwdnet_graph_build(dataset, &graph) == FWDNET_OK);
    CHECK(fwdnet_graph_node_count(graph) == 4);
    CHECK(fwdnet_graph_edge_count(graph) == 3);
    CHECK(fwdnet_graph_total_weight(graph) == 163);

    fwdnet_graph* filtered = nullptr;
    REQUIRE(fwdnet_graph_filter_min_frequency(graph, 52, &filtered) == FWDNET_OK);
    CHECK(fwdnet_graph_node_count(filtered) < fwdnet_graph_node_count(graph));

    fwdnet_analysis* analysis = nullptr;
    REQUIRE(fwdnet_analyze(graph,
                           R"({"roles":{"min_frequency":50},"layout":{"max_iterations":50}})",
                           &analysis) == FWDNET_OK);

    REQUIRE(fwdnet_analysis_write_gexf(analysis, dir.file("g.gexf").string().c_str()) == FWDNET_OK);
    REQUIRE(fwdnet_analysis_write_dot(analysis, dir.file("g.dot").string().c_str()) == FWDNET_OK);
    REQUIRE(fwdnet_analysis_write_report(analysis, dir.file("r.csv").string().c_str(), "csv") ==
            FWDNET_OK);
    REQUIRE(fwdnet_analysis_write_metrics_csv(analysis, dir.file("m.csv").string().c_str()) ==
            FWDNET_OK);
    CHECK(slurp(dir.file("g.gexf")).find("chan_a") != std::string::npos);
    CHECK(slurp(dir.file("m.csv")).find("username,kind,f,") == 0);

    char* layout_json = nullptr;
    REQUIRE(fwdnet_analysis_layout_json(analysis, &layout_json) == FWDNET_OK);
    CHECK(nlohmann::json::parse(layout_json).at("coordinates").size() == 4);
    fwdnet_string_free(layout_json);

    char* summary_json = nullptr;
    REQUIRE(fwdnet_analysis_summary_json(analysis, &summary_json) == FWDNET_OK);
    {
        nlohmann::json summary = nlohmann::json::parse(summary_json);
        CHECK(summary.at("nodes") == 4);
        CHECK(summary.at("total_weight") == 163);
    }
    fwdnet_string_free(summary_json);

    fwdnet_analysis_free(analysis);
    fwdnet_graph_free(filtered);
    fwdnet_graph_free(graph);
    fwdnet_dataset_free(dataset);
}

TEST_CASE("c api errors carry status codes and thread-local messages") {
    fwdnet_dataset* dataset = nullptr;
    CHECK(fwdnet_dataset_open(nullptr, "ndjson", nullptr, &dataset) == FWDNET_ERR_INVALID_ARG);
    CHECK(fwdnet_dataset_open("/nonexistent/x.ndjson", "ndjson", nullptr, &dataset) ==
          FWDNET_ERR_IO);
    CHECK(std::string(fwdnet_last_error()).find("cannot open") != std::string::npos);
    CHECK(fwdnet_dataset_open("/dev/null", "xml", nullptr, &dataset) == FWDNET_ERR_INVALID_ARG);
    CHECK(dataset == nullptr);

    CHECK(fwdnet_run_pipeline("{not json", nullptr) == FWDNET_ERR_CONFIG);
    CHECK(fwdnet_run_pipeline("{}", nullptr) == FWDNET_ERR_CONFIG); // no inputs

    CHECK(std::string(fwdnet_status_name(FWDNET_ERR_CONFIG)) == "config error");
    CHECK(std::string(fwdnet_status_name(FWDNET_OK)) == "ok");
}

TEST_CASE("the pipeline entry point returns the manifest") {
    TempDir dir("capipipe");
    write_sample(dir.file("input.ndjson"));
    nlohmann::json config = {
        {"inputs", {{{"path", dir.file("input.ndjson").string()}, {"format", "ndjson"}}}},
        {"output_dir", dir.file("out").string()},
        {"layout", {{"max_iterations", 50}}},
    };
    char* manifest_json = nullptr;
    REQUIRE(fwdnet_run_pipeline(config.dump().c_str(), &manifest_json) == FWDNET_OK);
    nlohmann::json manifest = nlohmann::json::parse(manifest_json);
    CHECK(manifest.at("stages").at("graph").at("total_weight") == 163);
    CHECK(std::filesystem::exists(dir.file("out") / "manifest.json"));
    fwdnet_string_free(manifest_json);
}
