#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fwdnet {

using NodeId = std::uint32_t;
using Weight = std::uint64_t;

enum class EntityKind : std::uint8_t {
    Unknown = 0,
    User = 1,
    Group = 2,
    Channel = 3,
};

const char* to_string(EntityKind kind);

/// Parses "user", "group"/"supergroup", "channel", "unknown" (case-insensitive).
/// Returns nullopt for anything else.
std::optional<EntityKind> parse_entity_kind(std::string_view text);

/// A Telegram actor: user, group or channel, identified by its public
/// username (or an anonymization pseudonym). Identity is the lowercased
/// handle; Telegram usernames are case-insensitive.
struct Entity {
    std::string username;
    EntityKind kind = EntityKind::Unknown;

    bool operator==(const Entity&) const = default;
};

/// One captured message. forward_source is empty when the message was not
/// forwarded; a numeric-only forward_source refers to an entity without a
/// public username.
struct ForwardRecord {
    std::string message_id;
    std::string chat;
    EntityKind chat_kind = EntityKind::Unknown;
    std::int64_t posted_at = 0; // epoch seconds, UTC
    std::string forward_source;
    EntityKind forward_source_kind = EntityKind::Unknown;

    bool has_forward_source() const { return !forward_source.empty(); }
};

/// True for a handle usable as a node identity: non-empty and not a bare
/// numeric id.
bool has_public_username(std::string_view handle);

std::string to_lower(std::string_view text);

enum class ErrorKind {
    InvalidArgument,
    Io,
    Parse,
    Config,
    State,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace fwdnet
