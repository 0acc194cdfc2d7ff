#pragma once

#include "fwdnet/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fwdnet {

enum class ExportFormat { Ndjson, Csv };

std::optional<ExportFormat> parse_export_format(std::string_view text);
const char* to_string(ExportFormat format);

/// Maps the canonical record fields onto the column / key names a foreign
/// export uses. Defaults are the canonical names themselves.
struct FieldMapping {
    std::string message_id = "message_id";
    std::string chat = "chat";
    std::string chat_kind = "chat_kind";
    std::string posted_at = "posted_at";
    std::string forward_source = "forward_source";
    std::string forward_source_kind = "forward_source_kind";
};

struct IngestReport {
    std::uint64_t records_read = 0;
    /// Records with a forward source that has a public username.
    std::uint64_t records_forwarded = 0;
    /// Records kept but contributing no edge: not forwarded, or forwarded
    /// from an entity without a public username.
    std::uint64_t records_non_forwarded = 0;
    /// Subset of records_non_forwarded: forwarded, but source username-less.
    std::uint64_t sourceless_forwards = 0;
    std::uint64_t records_skipped = 0;
    std::map<std::string, std::uint64_t> skip_reasons;
    std::uint64_t distinct_sources = 0;

    void merge(const IngestReport& other);
};

struct ParseResult {
    std::vector<ForwardRecord> records;
    IngestReport report;
};

/// Parses a message-export file into canonical records. Malformed rows are
/// skipped and tallied; an unreadable file throws Error{Io}. Usernames are
/// lowercased. NDJSON: one object per line, unknown keys ignored. CSV:
/// RFC-4180 with a required header row.
ParseResult parse_export(const std::filesystem::path& path, ExportFormat format,
                         const FieldMapping& mapping = {});

ParseResult parse_export(std::istream& input, ExportFormat format,
                         const FieldMapping& mapping = {});

/// Keeps exactly the records forwarded from a source with a public username.
std::vector<ForwardRecord> filter_forwarded(std::span<const ForwardRecord> records);

struct ExpansionCandidate {
    std::string username;
    EntityKind kind = EntityKind::Unknown;
    std::uint64_t occurrences = 0;

    bool operator==(const ExpansionCandidate&) const = default;
};

/// Second-wave collection plan: every forward source appearing at least
/// `threshold` times, ordered by occurrence count descending with username
/// as tiebreaker.
struct ExpansionPlan {
    std::vector<ExpansionCandidate> candidates;
    std::uint64_t threshold = 0;
};

ExpansionPlan expansion_candidates(std::span<const ForwardRecord> records,
                                   std::uint64_t threshold = 50);

/// Replaces every username whose resolved kind is User with a keyed-hash
/// pseudonym (HMAC-SHA256, 128-bit hex, "anon" prefix). Stable for a fixed
/// key; group and channel usernames pass through. Throws Error{InvalidArgument}
/// on an empty key.
std::vector<ForwardRecord> anonymize(std::vector<ForwardRecord> records,
                                     std::span<const std::uint8_t> key);

/// The pseudonym for one username under `key`. Exposed for tests.
std::string pseudonym(std::string_view username, std::span<const std::uint8_t> key);

/// ISO-8601 ("2022-08-01T12:34:56Z", optional offset / fraction) or integer
/// epoch seconds.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

} // namespace fwdnet
