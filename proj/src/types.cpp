#include "fwdnet/types.hpp"

#include <algorithm>
#include <cctype>

namespace fwdnet {

const char* to_string(EntityKind kind) {
    switch (kind) {
    case EntityKind::User: return "user";
    case EntityKind::Group: return "group";
    case EntityKind::Channel: return "channel";
    case EntityKind::Unknown: break;
    }
    return "unknown";
}

std::optional<EntityKind> parse_entity_kind(std::string_view text) {
    std::string lowered = to_lower(text);
    if (lowered == "user") return EntityKind::User;
    if (lowered == "group" || lowered == "supergroup") return EntityKind::Group;
    if (lowered == "channel") return EntityKind::Channel;
    if (lowered == "unknown" || lowered.empty()) return EntityKind::Unknown;
    return std::nullopt;
}

bool has_public_username(std::string_view handle) {
    if (handle.empty()) return false;
    return !std::all_of(handle.begin(), handle.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

} // namespace fwdnet
