#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace fwdnet {

/// Shortest representation that parses back to exactly the same double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<std::uint64_t> parse_uint(std::string_view text);

/// RFC-4180: quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

std::string xml_escape(std::string_view value);

} // namespace fwdnet
