#include "cenprobe/http_client.hpp"

#include <algorithm>

#include "cenprobe/strings.hpp"

namespace cenprobe {

std::string_view to_string(FetchStatus s) {
    switch (s) {
        case FetchStatus::ok: return "ok";
        case FetchStatus::reset: return "reset";
        case FetchStatus::timeout: return "timeout";
        case FetchStatus::conn_error: return "conn_error";
    }
    return "conn_error";
}

std::optional<FetchStatus> fetch_status_from_string(std::string_view s) {
    if (s == "ok") return FetchStatus::ok;
    if (s == "reset") return FetchStatus::reset;
    if (s == "timeout") return FetchStatus::timeout;
    if (s == "conn_error") return FetchStatus::conn_error;
    return std::nullopt;
}

std::optional<std::string> HttpResponse::header(std::string_view key) const {
    for (const auto& [k, v] : headers)
        if (strings::iequals(k, key)) return v;
    return std::nullopt;
}

std::vector<std::string> HttpResponse::header_keys() const {
    std::vector<std::string> keys;
    for (const auto& [k, v] : headers)
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    return keys;
}

namespace {

struct Reader {
    int fd;
    net::Deadline deadline;
    std::string buf;
    size_t pos = 0;
    net::IoStatus last = net::IoStatus::ok;

    // Ensures at least one unread byte or records the terminal status.
    bool fill() {
        if (pos < buf.size()) return true;
        char chunk[8192];
        auto r = net::read_some(fd, chunk, sizeof(chunk), deadline);
        last = r.status;
        if (r.status != net::IoStatus::ok) return false;
        buf.append(chunk, r.n);
        return true;
    }

    std::optional<std::string> line(size_t max_len = 64 * 1024) {
        for (;;) {
            auto nl = buf.find('\n', pos);
            if (nl != std::string::npos) {
                std::string out = buf.substr(pos, nl - pos);
                pos = nl + 1;
                if (!out.empty() && out.back() == '\r') out.pop_back();
                return out;
            }
            if (buf.size() - pos > max_len) {
                last = net::IoStatus::error;
                return std::nullopt;
            }
            if (!fill()) return std::nullopt;
        }
    }

    // Appends up to n bytes to out; stops early on terminal status.
    size_t read_n(std::string& out, size_t n) {
        size_t got = 0;
        while (got < n) {
            if (pos >= buf.size() && !fill()) break;
            size_t take = std::min(n - got, buf.size() - pos);
            out.append(buf, pos, take);
            pos += take;
            got += take;
        }
        return got;
    }
};

struct StatusLine {
    int code = 0;
    std::string reason;
};

std::optional<StatusLine> parse_status_line(const std::string& line) {
    if (!strings::starts_with(line, "HTTP/")) return std::nullopt;
    auto sp1 = line.find(' ');
    if (sp1 == std::string::npos) return std::nullopt;
    auto sp2 = line.find(' ', sp1 + 1);
    std::string code_str = line.substr(sp1 + 1, sp2 == std::string::npos ? std::string::npos
                                                                         : sp2 - sp1 - 1);
    if (code_str.size() != 3 || !std::all_of(code_str.begin(), code_str.end(), ::isdigit))
        return std::nullopt;
    StatusLine out;
    out.code = std::stoi(code_str);
    if (sp2 != std::string::npos) out.reason = line.substr(sp2 + 1);
    return out;
}

FetchStatus terminal_from_io(net::IoStatus s) {
    switch (s) {
        case net::IoStatus::reset: return FetchStatus::reset;
        case net::IoStatus::timeout: return FetchStatus::timeout;
        default: return FetchStatus::conn_error;
    }
}

bool read_headers(Reader& rd, HttpResponse& resp) {
    for (;;) {
        auto line = rd.line();
        if (!line) return false;
        if (line->empty()) return true;
        auto colon = line->find(':');
        if (colon == std::string::npos) continue;
        std::string key = strings::to_lower(strings::trim(line->substr(0, colon)));
        std::string value = strings::trim(line->substr(colon + 1));
        resp.headers.emplace_back(std::move(key), std::move(value));
    }
}

// Returns false on a terminal error before the body completed.
bool read_body(Reader& rd, HttpResponse& resp, size_t max_body) {
    auto te = resp.header("transfer-encoding");
    if (te && strings::to_lower(*te).find("chunked") != std::string::npos) {
        for (;;) {
            auto size_line = rd.line();
            if (!size_line) return false;
            size_t semi = size_line->find(';');
            std::string hex = strings::trim(semi == std::string::npos ? *size_line
                                                             : size_line->substr(0, semi));
            size_t chunk_len = 0;
            try {
                chunk_len = std::stoul(hex, nullptr, 16);
            } catch (...) {
                rd.last = net::IoStatus::error;
                return false;
            }
            if (chunk_len == 0) {
                rd.line();  // trailing CRLF / trailer section start
                return true;
            }
            size_t room = max_body > resp.body.size() ? max_body - resp.body.size() : 0;
            std::string chunk;
            if (rd.read_n(chunk, chunk_len) != chunk_len) return false;
            if (chunk.size() > room) {
                chunk.resize(room);
                resp.body_truncated = true;
            }
            resp.body += chunk;
            auto crlf = rd.line();
            if (!crlf) return false;
        }
    }
    if (auto cl = resp.header("content-length")) {
        size_t want = 0;
        try {
            want = std::stoul(*cl);
        } catch (...) {
            rd.last = net::IoStatus::error;
            return false;
        }
        size_t capped = std::min(want, max_body);
        size_t got = rd.read_n(resp.body, capped);
        if (got < capped) return false;
        if (want > max_body) {
            resp.body_truncated = true;
            std::string sink;
            rd.read_n(sink, want - max_body);
        }
        return true;
    }
    // No framing: body runs to connection close.
    for (;;) {
        size_t room = max_body > resp.body.size() ? max_body - resp.body.size() : 0;
        if (room == 0) {
            resp.body_truncated = true;
            return true;
        }
        size_t got = rd.read_n(resp.body, room);
        if (got < room) {
            if (rd.last == net::IoStatus::eof) return true;
            // A reset after bytes arrived still counts as an injected reset.
            return false;
        }
    }
}

}  // namespace

HttpResponse http_get(const net::Vantage& vantage, const Ipv4& ip, std::uint16_t port,
                      const std::string& host, const std::string& path,
                      const HttpFetchConfig& cfg) {
    HttpResponse resp;
    auto conn = vantage.connect(ip, port, cfg.timeout);
    if (conn.status != net::ConnectStatus::ok) {
        resp.status = conn.status == net::ConnectStatus::timeout ? FetchStatus::timeout
                                                                 : FetchStatus::conn_error;
        return resp;
    }
    net::Deadline deadline = net::deadline_in(cfg.timeout);

    std::string req = "GET " + path + " HTTP/1.1\r\n";
    req += "Host: " + host + "\r\n";
    req += "User-Agent: " + cfg.user_agent + "\r\n";
    req += "Accept: */*\r\n";
    req += "Connection: close\r\n\r\n";
    auto ws = net::write_all(conn.sock.fd(), req, deadline);
    if (ws != net::IoStatus::ok) {
        resp.status = ws == net::IoStatus::reset ? FetchStatus::reset
                      : ws == net::IoStatus::timeout ? FetchStatus::timeout
                                                     : FetchStatus::conn_error;
        return resp;
    }

    Reader rd{conn.sock.fd(), deadline, {}, 0, net::IoStatus::ok};
    auto status_line = rd.line();
    if (!status_line) {
        resp.status = terminal_from_io(rd.last);
        return resp;
    }
    auto sl = parse_status_line(*status_line);
    if (!sl) {
        resp.status = FetchStatus::conn_error;
        return resp;
    }
    resp.status_code = sl->code;
    resp.reason = sl->reason;
    if (!read_headers(rd, resp)) {
        resp.status = terminal_from_io(rd.last);
        return resp;
    }
    if (!read_body(rd, resp, cfg.max_body)) {
        resp.status = terminal_from_io(rd.last);
        return resp;
    }
    resp.status = FetchStatus::ok;
    return resp;
}

std::optional<HttpResponse> parse_http_response(std::string_view raw) {
    auto header_end = raw.find("\r\n\r\n");
    if (header_end == std::string_view::npos) return std::nullopt;
    std::string head(raw.substr(0, header_end));
    HttpResponse resp;
    auto nl = head.find("\r\n");
    std::string first = head.substr(0, nl == std::string::npos ? head.size() : nl);
    auto sl = parse_status_line(first);
    if (!sl) return std::nullopt;
    resp.status_code = sl->code;
    resp.reason = sl->reason;
    size_t pos = nl == std::string::npos ? head.size() : nl + 2;
    while (pos < head.size()) {
        auto next = head.find("\r\n", pos);
        std::string line = head.substr(pos, next == std::string::npos ? std::string::npos
                                                                      : next - pos);
        pos = next == std::string::npos ? head.size() : next + 2;
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        resp.headers.emplace_back(strings::to_lower(strings::trim(line.substr(0, colon))),
                                  strings::trim(line.substr(colon + 1)));
    }
    resp.body = std::string(raw.substr(header_end + 4));
    resp.status = FetchStatus::ok;
    return resp;
}

}  // namespace cenprobe
