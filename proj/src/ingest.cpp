#include "fwdnet/ingest.hpp"

#include "fwdnet/graph.hpp"

#include <json.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <variant>

namespace fwdnet {

namespace {

// Howard Hinnant's civil-date algorithm; proleptic Gregorian, UTC.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_fixed_uint(std::string_view text, std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > text.size()) return false;
    unsigned value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (!std::isdigit(c)) return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
    // YYYY-MM-DD[T ]HH:MM:SS[.fraction][Z|+HH:MM|-HH:MM|+HHMM|-HHMM]
    unsigned year, month, day, hour, minute, second;
    if (text.size() < 19) return std::nullopt;
    if (!parse_fixed_uint(text, 0, 4, year) || text[4] != '-' ||
        !parse_fixed_uint(text, 5, 2, month) || text[7] != '-' ||
        !parse_fixed_uint(text, 8, 2, day) || (text[10] != 'T' && text[10] != ' ') ||
        !parse_fixed_uint(text, 11, 2, hour) || text[13] != ':' ||
        !parse_fixed_uint(text, 14, 2, minute) || text[16] != ':' ||
        !parse_fixed_uint(text, 17, 2, second))
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
        return std::nullopt;

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
    }

    std::int64_t offset_seconds = 0;
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int sign = c == '+' ? 1 : -1;
            ++pos;
            unsigned oh = 0, om = 0;
            if (!parse_fixed_uint(text, pos, 2, oh)) return std::nullopt;
            pos += 2;
            if (pos < text.size() && text[pos] == ':') ++pos;
            if (pos < text.size()) {
                if (!parse_fixed_uint(text, pos, 2, om)) return std::nullopt;
                pos += 2;
            }
            if (oh > 23 || om > 59) return std::nullopt;
            offset_seconds = sign * (static_cast<std::int64_t>(oh) * 3600 + om * 60);
        } else {
            return std::nullopt;
        }
    }
    if (pos != text.size()) return std::nullopt;

    std::int64_t days = days_from_civil(year, month, day);
    std::int64_t local = days * 86400 + hour * 3600 + minute * 60 + second;
    return local - offset_seconds;
}

} // namespace

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool numeric = text[0] == '-' ? text.size() > 1 : true;
    for (std::size_t i = (text[0] == '-' ? 1 : 0); i < text.size() && numeric; ++i)
        numeric = std::isdigit(static_cast<unsigned char>(text[i])) != 0;
    if (numeric) {
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
        return value;
    }
    return parse_iso8601(text);
}

std::optional<ExportFormat> parse_export_format(std::string_view text) {
    std::string lowered = to_lower(text);
    if (lowered == "ndjson" || lowered == "jsonl") return ExportFormat::Ndjson;
    if (lowered == "csv") return ExportFormat::Csv;
    return std::nullopt;
}

const char* to_string(ExportFormat format) {
    return format == ExportFormat::Ndjson ? "ndjson" : "csv";
}

void IngestReport::merge(const IngestReport& other) {
    records_read += other.records_read;
    records_forwarded += other.records_forwarded;
    records_non_forwarded += other.records_non_forwarded;
    sourceless_forwards += other.sourceless_forwards;
    records_skipped += other.records_skipped;
    for (const auto& [reason, count] : other.skip_reasons) skip_reasons[reason] += count;
    // distinct_sources is not additive across files; callers recompute it
    // over the concatenated records.
}

namespace {

struct RawRow {
    std::optional<std::string> message_id;
    std::optional<std::string> chat;
    std::optional<std::string> chat_kind;
    std::optional<std::string> posted_at;
    std::optional<std::string> forward_source;
    std::optional<std::string> forward_source_kind;
};

// Returns a skip reason, or empty string on success.
std::string convert_row(const RawRow& row, ForwardRecord& out) {
    if (!row.chat || row.chat->empty()) return "missing chat";
    std::string chat = to_lower(*row.chat);
    if (!has_public_username(chat)) return "chat without username";
    if (!row.chat_kind || row.chat_kind->empty()) return "missing chat_kind";
    auto chat_kind = parse_entity_kind(*row.chat_kind);
    if (!chat_kind || (*chat_kind != EntityKind::Group && *chat_kind != EntityKind::Channel))
        return "invalid chat_kind";

    out = ForwardRecord();
    out.chat = std::move(chat);
    out.chat_kind = *chat_kind;
    if (row.message_id) out.message_id = *row.message_id;
    if (row.posted_at && !row.posted_at->empty()) {
        auto ts = parse_timestamp(*row.posted_at);
        if (!ts) return "invalid posted_at";
        out.posted_at = *ts;
    }
    if (row.forward_source && !row.forward_source->empty()) {
        out.forward_source = to_lower(*row.forward_source);
        if (row.forward_source_kind) {
            // kinds are taken from the export when present, never guessed
            out.forward_source_kind =
                parse_entity_kind(*row.forward_source_kind).value_or(EntityKind::Unknown);
        }
    }
    return {};
}

void account(const ForwardRecord& record, IngestReport& report,
             std::unordered_set<std::string>& sources) {
    if (!record.has_forward_source()) {
        ++report.records_non_forwarded;
    } else if (!has_public_username(record.forward_source)) {
        ++report.records_non_forwarded;
        ++report.sourceless_forwards;
    } else {
        ++report.records_forwarded;
        sources.insert(record.forward_source);
    }
}

std::optional<std::string> json_field(const nlohmann::json& obj, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    if (it->is_number_unsigned()) return std::to_string(it->get<std::uint64_t>());
    if (it->is_boolean()) return std::string(it->get<bool>() ? "true" : "false");
    return it->dump();
}

ParseResult parse_ndjson(std::istream& input, const FieldMapping& mapping) {
    ParseResult result;
    std::unordered_set<std::string> sources;
    std::string line;
    while (std::getline(input, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        ++result.report.records_read;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            ++result.report.records_skipped;
            ++result.report.skip_reasons["invalid json"];
            continue;
        }
        RawRow row;
        row.message_id = json_field(obj, mapping.message_id);
        row.chat = json_field(obj, mapping.chat);
        row.chat_kind = json_field(obj, mapping.chat_kind);
        row.posted_at = json_field(obj, mapping.posted_at);
        row.forward_source = json_field(obj, mapping.forward_source);
        row.forward_source_kind = json_field(obj, mapping.forward_source_kind);
        ForwardRecord record;
        std::string reason = convert_row(row, record);
        if (!reason.empty()) {
            ++result.report.records_skipped;
            ++result.report.skip_reasons[reason];
            continue;
        }
        account(record, result.report, sources);
        result.records.push_back(std::move(record));
    }
    result.report.distinct_sources = sources.size();
    return result;
}

// RFC-4180 tokenizer. Returns false at end of input.
bool read_csv_row(std::istream& input, std::vector<std::string>& fields) {
    fields.clear();
    int c = input.peek();
    if (c == EOF) return false;
    std::string field;
    bool quoted = false;
    bool any = false;
    while ((c = input.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (input.peek() == '"') {
                    field.push_back('"');
                    input.get();
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            if (input.peek() == '\n') input.get();
            break;
        } else {
            field.push_back(ch);
        }
    }
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

ParseResult parse_csv(std::istream& input, const FieldMapping& mapping) {
    ParseResult result;
    std::unordered_set<std::string> sources;
    std::vector<std::string> header;
    if (!read_csv_row(input, header)) return result; // empty file: zero records

    std::unordered_map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < header.size(); ++i) columns.emplace(header[i], i);
    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = columns.find(name);
        if (it == columns.end()) return std::nullopt;
        return it->second;
    };
    const auto col_message_id = column(mapping.message_id);
    const auto col_chat = column(mapping.chat);
    const auto col_chat_kind = column(mapping.chat_kind);
    const auto col_posted_at = column(mapping.posted_at);
    const auto col_source = column(mapping.forward_source);
    const auto col_source_kind = column(mapping.forward_source_kind);

    std::vector<std::string> fields;
    while (read_csv_row(input, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue; // trailing blank line
        ++result.report.records_read;
        if (fields.size() != header.size()) {
            ++result.report.records_skipped;
            ++result.report.skip_reasons["malformed row"];
            continue;
        }
        auto cell = [&](const std::optional<std::size_t>& idx) -> std::optional<std::string> {
            if (!idx) return std::nullopt;
            return fields[*idx];
        };
        RawRow row;
        row.message_id = cell(col_message_id);
        row.chat = cell(col_chat);
        row.chat_kind = cell(col_chat_kind);
        row.posted_at = cell(col_posted_at);
        row.forward_source = cell(col_source);
        row.forward_source_kind = cell(col_source_kind);
        ForwardRecord record;
        std::string reason = convert_row(row, record);
        if (!reason.empty()) {
            ++result.report.records_skipped;
            ++result.report.skip_reasons[reason];
            continue;
        }
        account(record, result.report, sources);
        result.records.push_back(std::move(record));
    }
    result.report.distinct_sources = sources.size();
    return result;
}

} // namespace

ParseResult parse_export(std::istream& input, ExportFormat format, const FieldMapping& mapping) {
    switch (format) {
    case ExportFormat::Ndjson: return parse_ndjson(input, mapping);
    case ExportFormat::Csv: return parse_csv(input, mapping);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown export format");
}

ParseResult parse_export(const std::filesystem::path& path, ExportFormat format,
                         const FieldMapping& mapping) {
    std::ifstream input(path, std::ios::binary);
    if (!input) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return parse_export(input, format, mapping);
}

std::vector<ForwardRecord> filter_forwarded(std::span<const ForwardRecord> records) {
    std::vector<ForwardRecord> kept;
    for (const ForwardRecord& record : records) {
        if (record.has_forward_source() && has_public_username(record.forward_source))
            kept.push_back(record);
    }
    return kept;
}

ExpansionPlan expansion_candidates(std::span<const ForwardRecord> records,
                                   std::uint64_t threshold) {
    if (threshold < 1) throw Error(ErrorKind::InvalidArgument, "threshold must be >= 1");
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const ForwardRecord& record : records) {
        if (record.has_forward_source() && has_public_username(record.forward_source))
            ++counts[record.forward_source];
    }
    EntityRegistry registry = EntityRegistry::from_records(records);
    ExpansionPlan plan;
    plan.threshold = threshold;
    for (const auto& [username, count] : counts) {
        if (count >= threshold)
            plan.candidates.push_back({username, registry.kind_of(username), count});
    }
    std::sort(plan.candidates.begin(), plan.candidates.end(),
              [](const ExpansionCandidate& a, const ExpansionCandidate& b) {
                  if (a.occurrences != b.occurrences) return a.occurrences > b.occurrences;
                  return a.username < b.username;
              });
    return plan;
}

std::string pseudonym(std::string_view username, std::span<const std::uint8_t> key) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    std::size_t digest_len = 0;
    if (EVP_Q_mac(nullptr, "HMAC", nullptr, "SHA256", nullptr, key.data(), key.size(),
                  reinterpret_cast<const unsigned char*>(username.data()), username.size(),
                  digest, sizeof(digest), &digest_len) == nullptr ||
        digest_len < 16) {
        throw Error(ErrorKind::State, "HMAC computation failed");
    }
    static const char hex[] = "0123456789abcdef";
    std::string out = "anon";
    out.reserve(4 + 32);
    for (std::size_t i = 0; i < 16; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::vector<ForwardRecord> anonymize(std::vector<ForwardRecord> records,
                                     std::span<const std::uint8_t> key) {
    if (key.empty()) throw Error(ErrorKind::InvalidArgument, "anonymization key must not be empty");
    EntityRegistry registry = EntityRegistry::from_records(records);
    std::unordered_map<std::string, std::string> replacements;
    auto replace = [&](std::string& username) {
        if (username.empty() || registry.kind_of(username) != EntityKind::User) return;
        auto it = replacements.find(username);
        if (it == replacements.end())
            it = replacements.emplace(username, pseudonym(username, key)).first;
        username = it->second;
    };
    for (ForwardRecord& record : records) {
        replace(record.chat);
        replace(record.forward_source);
    }
    return records;
}

} // namespace fwdnet
