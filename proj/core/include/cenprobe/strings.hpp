#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cenprobe::strings {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

// RFC 4648 §5 base64url, no padding. Used by the DoH transport.
std::string base64url_encode(std::string_view data);
std::optional<std::string> base64url_decode(std::string_view text);

// Splits "host:port"; returns nullopt when the port is missing or not numeric.
std::optional<std::pair<std::string, std::uint16_t>> split_host_port(std::string_view s);

// One CSV record, RFC 4180 quoting. Returns nullopt when quoting is malformed.
std::optional<std::vector<std::string>> parse_csv_row(std::string_view line);

}  // namespace cenprobe::strings
