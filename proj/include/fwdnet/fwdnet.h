/* C interface to the forwarded-message network analyzer.
 *
 * All functions return fwdnet_status; FWDNET_OK means success and
 * fwdnet_last_error() describes the most recent failure on the calling
 * thread. Objects returned through out-parameters are owned by the caller
 * and released with the matching _free function; strings returned through
 * char** out-parameters are released with fwdnet_string_free().
 */
#ifndef FWDNET_H
#define FWDNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FWDNET_API __declspec(dllexport)
#else
#define FWDNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fwdnet_status {
    FWDNET_OK = 0,
    FWDNET_ERR_INVALID_ARG = 1,
    FWDNET_ERR_IO = 2,
    FWDNET_ERR_PARSE = 3,
    FWDNET_ERR_CONFIG = 4,
    FWDNET_ERR_STATE = 5
} fwdnet_status;

/* A parsed message export (records plus ingest accounting). */
typedef struct fwdnet_dataset fwdnet_dataset;
/* An immutable directed weighted forwarding graph. */
typedef struct fwdnet_graph fwdnet_graph;
/* Metrics, communities, roles and layout computed for one graph. */
typedef struct fwdnet_analysis fwdnet_analysis;

FWDNET_API const char* fwdnet_status_name(fwdnet_status status);
/* Message for the last failure on this thread; empty string if none. */
FWDNET_API const char* fwdnet_last_error(void);
FWDNET_API void fwdnet_string_free(char* text);

/* format: "ndjson" or "csv". mapping_json: optional JSON object mapping the
 * canonical field names to the export's column names (NULL for defaults). */
FWDNET_API fwdnet_status fwdnet_dataset_open(const char* path, const char* format,
                                             const char* mapping_json, fwdnet_dataset** out);
FWDNET_API void fwdnet_dataset_free(fwdnet_dataset* dataset);
FWDNET_API size_t fwdnet_dataset_record_count(const fwdnet_dataset* dataset);
/* Replaces user usernames with keyed pseudonyms. */
FWDNET_API fwdnet_status fwdnet_dataset_anonymize(fwdnet_dataset* dataset, const uint8_t* key,
                                                  size_t key_len);
/* Drops every record without a publicly attributed forward source. */
FWDNET_API fwdnet_status fwdnet_dataset_keep_forwarded(fwdnet_dataset* dataset);
FWDNET_API fwdnet_status fwdnet_dataset_report_json(const fwdnet_dataset* dataset,
                                                    char** out_json);
FWDNET_API fwdnet_status fwdnet_dataset_expansion_plan_json(const fwdnet_dataset* dataset,
                                                            uint64_t threshold, char** out_json);
/* Writes the records back out as canonical NDJSON. */
FWDNET_API fwdnet_status fwdnet_dataset_write_ndjson(const fwdnet_dataset* dataset,
                                                     const char* path);

FWDNET_API fwdnet_status fwdnet_graph_build(const fwdnet_dataset* dataset, fwdnet_graph** out);
FWDNET_API fwdnet_status fwdnet_graph_filter_min_frequency(const fwdnet_graph* graph,
                                                           uint64_t min_frequency,
                                                           fwdnet_graph** out);
FWDNET_API void fwdnet_graph_free(fwdnet_graph* graph);
FWDNET_API size_t fwdnet_graph_node_count(const fwdnet_graph* graph);
FWDNET_API size_t fwdnet_graph_edge_count(const fwdnet_graph* graph);
FWDNET_API uint64_t fwdnet_graph_total_weight(const fwdnet_graph* graph);

/* options_json (all optional): {"community": {"resolution": 1.0, "seed": 0},
 * "roles": {...}, "layout": {...}} using the run-config field names. */
FWDNET_API fwdnet_status fwdnet_analyze(const fwdnet_graph* graph, const char* options_json,
                                        fwdnet_analysis** out);
FWDNET_API void fwdnet_analysis_free(fwdnet_analysis* analysis);
FWDNET_API fwdnet_status fwdnet_analysis_write_gexf(const fwdnet_analysis* analysis,
                                                    const char* path);
FWDNET_API fwdnet_status fwdnet_analysis_write_dot(const fwdnet_analysis* analysis,
                                                   const char* path);
/* format: "csv" or "json". */
FWDNET_API fwdnet_status fwdnet_analysis_write_report(const fwdnet_analysis* analysis,
                                                      const char* path, const char* format);
FWDNET_API fwdnet_status fwdnet_analysis_write_metrics_csv(const fwdnet_analysis* analysis,
                                                           const char* path);
/* Node coordinates as a JSON object keyed by username. */
FWDNET_API fwdnet_status fwdnet_analysis_layout_json(const fwdnet_analysis* analysis,
                                                     char** out_json);
/* Community count, modularity, role tallies and graph stats as JSON. */
FWDNET_API fwdnet_status fwdnet_analysis_summary_json(const fwdnet_analysis* analysis,
                                                      char** out_json);

/* Runs the whole pipeline from a run-config JSON document. On success the
 * manifest JSON is returned through out_manifest_json when non-NULL. */
FWDNET_API fwdnet_status fwdnet_run_pipeline(const char* config_json, char** out_manifest_json);

#ifdef __cplusplus
}
#endif

#endif /* FWDNET_H */
