#include "cenprobe/dns_wire.hpp"

#include <algorithm>
#include <cctype>

namespace cenprobe::dns::wire {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
    out += static_cast<char>(v >> 8);
    out += static_cast<char>(v & 0xFF);
}

void put_u32(std::string& out, std::uint32_t v) {
    out += static_cast<char>((v >> 24) & 0xFF);
    out += static_cast<char>((v >> 16) & 0xFF);
    out += static_cast<char>((v >> 8) & 0xFF);
    out += static_cast<char>(v & 0xFF);
}

bool append_name(std::string& out, std::string_view name) {
    if (name.size() > 253) return false;
    size_t start = 0;
    for (size_t i = 0; i <= name.size(); ++i) {
        if (i == name.size() || name[i] == '.') {
            size_t len = i - start;
            if (len == 0 || len > 63) return false;
            out += static_cast<char>(len);
            out.append(name.substr(start, len));
            start = i + 1;
        }
    }
    out += '\0';
    return true;
}

struct Reader {
    std::string_view buf;
    size_t pos = 0;

    bool u8(std::uint8_t& v) {
        if (pos >= buf.size()) return false;
        v = static_cast<std::uint8_t>(buf[pos++]);
        return true;
    }
    bool u16(std::uint16_t& v) {
        std::uint8_t hi, lo;
        if (!u8(hi) || !u8(lo)) return false;
        v = static_cast<std::uint16_t>((hi << 8) | lo);
        return true;
    }
    bool u32(std::uint32_t& v) {
        std::uint16_t hi, lo;
        if (!u16(hi) || !u16(lo)) return false;
        v = (static_cast<std::uint32_t>(hi) << 16) | lo;
        return true;
    }
    bool skip(size_t n) {
        if (pos + n > buf.size()) return false;
        pos += n;
        return true;
    }

    // Name with compression pointers; bounded jumps guard against loops.
    bool name(std::string& out) {
        size_t p = pos;
        bool jumped = false;
        int jumps = 0;
        while (true) {
            if (p >= buf.size()) return false;
            std::uint8_t len = static_cast<std::uint8_t>(buf[p]);
            if ((len & 0xC0) == 0xC0) {
                if (p + 1 >= buf.size() || ++jumps > 32) return false;
                size_t target = static_cast<size_t>((len & 0x3F) << 8) |
                                static_cast<std::uint8_t>(buf[p + 1]);
                if (!jumped) pos = p + 2;
                jumped = true;
                if (target >= buf.size()) return false;
                p = target;
                continue;
            }
            if (len == 0) {
                if (!jumped) pos = p + 1;
                return true;
            }
            if (p + 1 + len > buf.size()) return false;
            if (!out.empty()) out += '.';
            for (size_t i = 0; i < len; ++i)
                out += static_cast<char>(std::tolower(static_cast<unsigned char>(buf[p + 1 + i])));
            p += 1 + len;
        }
    }
};

}  // namespace

std::string encode_query(std::uint16_t id, std::string_view qname) {
    std::string out;
    put_u16(out, id);
    put_u16(out, 0x0100);  // RD
    put_u16(out, 1);       // QDCOUNT
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    if (!append_name(out, qname)) return {};
    put_u16(out, kTypeA);
    put_u16(out, kClassIn);
    return out;
}

std::optional<ParsedResponse> parse_response(std::string_view payload) {
    Reader r{payload};
    ParsedResponse out;
    std::uint16_t flags, qd, an, ns, ar;
    if (!r.u16(out.id) || !r.u16(flags) || !r.u16(qd) || !r.u16(an) || !r.u16(ns) || !r.u16(ar))
        return std::nullopt;
    out.is_response = (flags & 0x8000) != 0;
    out.truncated = (flags & 0x0200) != 0;
    out.rcode = flags & 0x000F;

    for (std::uint16_t i = 0; i < qd; ++i) {
        std::string name;
        std::uint16_t qtype, qclass;
        if (!r.name(name) || !r.u16(qtype) || !r.u16(qclass)) return std::nullopt;
        if (i == 0) out.qname = name;
    }
    for (std::uint16_t i = 0; i < an; ++i) {
        std::string name;
        std::uint16_t rtype, rclass, rdlen;
        std::uint32_t ttl;
        if (!r.name(name) || !r.u16(rtype) || !r.u16(rclass) || !r.u32(ttl) || !r.u16(rdlen))
            return std::nullopt;
        if (rtype == kTypeA && rclass == kClassIn && rdlen == 4) {
            if (r.pos + 4 > payload.size()) return std::nullopt;
            std::uint32_t v = 0;
            for (int k = 0; k < 4; ++k)
                v = (v << 8) | static_cast<std::uint8_t>(payload[r.pos + static_cast<size_t>(k)]);
            Ipv4 ip(v);
            if (std::find(out.a_records.begin(), out.a_records.end(), ip) ==
                out.a_records.end()) {
                out.a_records.push_back(ip);
                out.min_ttl = out.min_ttl ? std::min(*out.min_ttl, ttl) : ttl;
            }
            r.pos += 4;
        } else {
            if (!r.skip(rdlen)) return std::nullopt;
        }
    }
    return out;
}

std::optional<Question> parse_query(std::string_view payload) {
    Reader r{payload};
    Question q;
    std::uint16_t flags, qd, an, ns, ar;
    if (!r.u16(q.id) || !r.u16(flags) || !r.u16(qd) || !r.u16(an) || !r.u16(ns) || !r.u16(ar))
        return std::nullopt;
    if ((flags & 0x8000) != 0 || qd == 0) return std::nullopt;
    if (!r.name(q.qname) || !r.u16(q.qtype) || !r.u16(q.qclass)) return std::nullopt;
    return q;
}

std::string encode_response(const Question& q, const std::vector<AnswerRecord>& answers,
                            int rcode) {
    std::string out;
    put_u16(out, q.id);
    std::uint16_t flags = 0x8000 | 0x0100 | 0x0080;  // QR, RD, RA
    flags = static_cast<std::uint16_t>(flags | (rcode & 0x0F));
    put_u16(out, flags);
    put_u16(out, 1);
    put_u16(out, static_cast<std::uint16_t>(answers.size()));
    put_u16(out, 0);
    put_u16(out, 0);
    append_name(out, q.qname);
    put_u16(out, q.qtype);
    put_u16(out, q.qclass);
    for (const auto& a : answers) {
        append_name(out, a.name);
        put_u16(out, kTypeA);
        put_u16(out, kClassIn);
        put_u32(out, a.ttl);
        put_u16(out, 4);
        put_u32(out, a.ip.value());
    }
    return out;
}

}  // namespace cenprobe::dns::wire
