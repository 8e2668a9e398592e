#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cenprobe/net.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe {

enum class FetchStatus { ok, reset, timeout, conn_error };
std::string_view to_string(FetchStatus s);
std::optional<FetchStatus> fetch_status_from_string(std::string_view s);

struct HttpFetchConfig {
    std::chrono::milliseconds timeout{30'000};
    size_t max_body = 2 * 1024 * 1024;
    std::string user_agent = "Mozilla/5.0 (X11; Linux x86_64; rv:109.0) Gecko/20100101 Firefox/115.0";
};

struct HttpResponse {
    FetchStatus status = FetchStatus::conn_error;
    int status_code = 0;
    std::string reason;
    // Keys lowercased, arrival order preserved, duplicates kept.
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    bool body_truncated = false;

    std::optional<std::string> header(std::string_view key) const;
    std::vector<std::string> header_keys() const;  // deduped, arrival order
};

/// Plain HTTP/1.1 GET over the vantage with Connection: close. Never follows
/// redirects; the response carries whatever Location the server sent. A TCP
/// reset at any stage maps to FetchStatus::reset, a missed deadline to
/// timeout, and a failed connect to conn_error.
HttpResponse http_get(const net::Vantage& vantage, const Ipv4& ip, std::uint16_t port,
                      const std::string& host, const std::string& path = "/",
                      const HttpFetchConfig& cfg = {});

/// Parses a full HTTP/1.1 response already in memory (used by replay tests).
std::optional<HttpResponse> parse_http_response(std::string_view raw);

}  // namespace cenprobe
