#include "cenprobe/sim/http_origin.hpp"

#include "cenprobe/strings.hpp"

namespace cenprobe::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stable_hash(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

std::uint64_t stable_hash(std::uint64_t seed, std::string_view a, std::string_view b) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ stable_hash(a));
    h = splitmix64(h ^ stable_hash(b));
    return h;
}

std::string generate_origin_body(const std::string& domain, std::uint64_t seed) {
    std::uint64_t h = stable_hash(seed, domain, "body");
    size_t paras = 1 + (h % 4);
    size_t items = (h >> 8) % 5;
    size_t links = 1 + ((h >> 16) % 3);

    std::string b = "<!DOCTYPE html><html><head><title>" + domain + "</title></head><body>";
    b += "<h1>" + domain + "</h1>";
    for (size_t i = 0; i < paras; ++i) {
        b += "<p>Section " + std::to_string(i + 1) + " of " + domain + ". ";
        size_t words = 4 + ((h >> (24 + i * 4)) % 8);
        for (size_t w = 0; w < words; ++w) b += "lorem ";
        b += "</p>";
    }
    if (items) {
        b += "<ul>";
        for (size_t i = 0; i < items; ++i) b += "<li>item " + std::to_string(i + 1) + "</li>";
        b += "</ul>";
    }
    for (size_t i = 0; i < links; ++i)
        b += "<a href=\"/p" + std::to_string(i) + "\">more</a>";
    b += "</body></html>";
    return b;
}

namespace {

std::string reason_phrase(int status) {
    switch (status) {
        case 200: return "OK";
        case 204: return "No Content";
        case 301: return "Moved Permanently";
        case 302: return "Found";
        case 307: return "Temporary Redirect";
        case 400: return "Bad Request";
        case 403: return "Forbidden";
        case 404: return "Not Found";
        case 410: return "Gone";
        case 451: return "Unavailable For Legal Reasons";
        case 500: return "Internal Server Error";
        case 502: return "Bad Gateway";
        case 503: return "Service Unavailable";
        default: return "Status";
    }
}

std::string build_response(int status, const std::map<std::string, std::string>& extra_headers,
                           const std::string& body) {
    std::string out = "HTTP/1.1 " + std::to_string(status) + " " + reason_phrase(status) + "\r\n";
    out += "Server: simweb/1.0\r\n";
    bool has_ct = false;
    for (const auto& [k, v] : extra_headers) {
        if (strings::iequals(k, "content-length")) continue;  // always recomputed
        if (strings::iequals(k, "content-type")) has_ct = true;
        out += k + ": " + v + "\r\n";
    }
    if (!has_ct && !body.empty()) out += "Content-Type: text/html\r\n";
    out += "Content-Length: " + std::to_string(body.size()) + "\r\n";
    out += "Connection: close\r\n\r\n";
    out += body;
    return out;
}

}  // namespace

std::string OriginServer::render_response(const std::string& host) const {
    const Scenario& sc = *cfg_.scenario;
    auto it = sc.origins.find(host);
    if (it == sc.origins.end()) {
        return build_response(404, {}, "<html><body><h1>unknown site</h1></body></html>");
    }
    const OriginSpec& spec = it->second;

    std::map<std::string, std::string> headers = spec.headers;
    if (spec.status / 100 == 3 && !spec.redirect.empty()) headers["Location"] = spec.redirect;

    std::string body = spec.body;
    if (body.empty() && spec.status / 100 == 2) body = generate_origin_body(host, sc.seed);
    if (body.empty() && spec.status / 100 != 2 && spec.status / 100 != 3)
        body = "<html><body><h1>" + std::to_string(spec.status) + " " +
               reason_phrase(spec.status) + "</h1></body></html>";

    // Per-vantage jitter: whitespace only, so tag vectors stay identical.
    if (!body.empty() && cfg_.max_jitter > 0) {
        size_t jitter = stable_hash(sc.seed, host, cfg_.id) % (cfg_.max_jitter + 1);
        body.append(jitter, ' ');
    }
    return build_response(spec.status, headers, body);
}

void OriginServer::handle(net::Socket conn) {
    net::Deadline deadline = net::deadline_in(std::chrono::milliseconds(5000));

    // Read the request head; the body (if any) is irrelevant to routing.
    std::string head;
    char buf[4096];
    while (head.find("\r\n\r\n") == std::string::npos) {
        auto r = net::read_some(conn.fd(), buf, sizeof(buf), deadline);
        if (r.status != net::IoStatus::ok) return;
        head.append(buf, r.n);
        if (head.size() > 64 * 1024) return;
    }

    std::string host;
    for (const auto& line : strings::split(head.substr(0, head.find("\r\n\r\n")), '\n')) {
        std::string l = strings::trim(line);
        if (strings::starts_with(strings::to_lower(l), "host:"))
            host = strings::trim(l.substr(5));
    }
    if (auto colon = host.rfind(':'); colon != std::string::npos) host = host.substr(0, colon);
    host = strings::to_lower(host);

    if (cfg_.transcript)
        cfg_.transcript->record("origin:" + cfg_.id, "http_request", host);

    std::string response = render_response(host);
    net::write_all(conn.fd(), response, deadline);
}

}  // namespace cenprobe::sim
