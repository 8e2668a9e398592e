#include "cenprobe/punycode.hpp"

#include <cstdint>
#include <vector>

namespace cenprobe::punycode {

namespace {

// RFC 3492 parameters.
constexpr uint32_t kBase = 36, kTmin = 1, kTmax = 26, kSkew = 38, kDamp = 700;
constexpr uint32_t kInitialBias = 72, kInitialN = 128;

uint32_t adapt(uint32_t delta, uint32_t numpoints, bool firsttime) {
    delta = firsttime ? delta / kDamp : delta / 2;
    delta += delta / numpoints;
    uint32_t k = 0;
    while (delta > ((kBase - kTmin) * kTmax) / 2) {
        delta /= kBase - kTmin;
        k += kBase;
    }
    return k + (((kBase - kTmin + 1) * delta) / (delta + kSkew));
}

char digit_char(uint32_t d) {
    return d < 26 ? static_cast<char>('a' + d) : static_cast<char>('0' + d - 26);
}

std::optional<std::vector<uint32_t>> utf8_to_codepoints(std::string_view s) {
    std::vector<uint32_t> cps;
    size_t i = 0;
    while (i < s.size()) {
        uint8_t b = static_cast<uint8_t>(s[i]);
        uint32_t cp = 0;
        int extra = 0;
        if (b < 0x80) {
            cp = b;
        } else if ((b & 0xE0) == 0xC0) {
            cp = b & 0x1F;
            extra = 1;
        } else if ((b & 0xF0) == 0xE0) {
            cp = b & 0x0F;
            extra = 2;
        } else if ((b & 0xF8) == 0xF0) {
            cp = b & 0x07;
            extra = 3;
        } else {
            return std::nullopt;
        }
        if (i + static_cast<size_t>(extra) >= s.size() + (extra == 0 ? 1 : 0)) {
            if (i + extra >= s.size() && extra > 0) return std::nullopt;
        }
        for (int k = 1; k <= extra; ++k) {
            if (i + static_cast<size_t>(k) >= s.size()) return std::nullopt;
            uint8_t cb = static_cast<uint8_t>(s[i + static_cast<size_t>(k)]);
            if ((cb & 0xC0) != 0x80) return std::nullopt;
            cp = (cp << 6) | (cb & 0x3F);
        }
        if (cp > 0x10FFFF) return std::nullopt;
        cps.push_back(cp);
        i += static_cast<size_t>(extra) + 1;
    }
    return cps;
}

}  // namespace

std::optional<std::string> encode_label(std::string_view utf8_label) {
    bool ascii = true;
    for (char c : utf8_label) {
        if (static_cast<unsigned char>(c) >= 0x80) {
            ascii = false;
            break;
        }
    }
    if (ascii) return std::string(utf8_label);

    auto cps_opt = utf8_to_codepoints(utf8_label);
    if (!cps_opt) return std::nullopt;
    const auto& input = *cps_opt;

    std::string out;
    for (uint32_t cp : input)
        if (cp < 0x80) out += static_cast<char>(cp);
    uint32_t basic = static_cast<uint32_t>(out.size());
    uint32_t handled = basic;
    if (basic > 0) out += '-';

    uint32_t n = kInitialN, delta = 0, bias = kInitialBias;
    while (handled < input.size()) {
        uint32_t m = 0x110000;
        for (uint32_t cp : input)
            if (cp >= n && cp < m) m = cp;
        if (m - n > (0xFFFFFFFFu - delta) / (handled + 1)) return std::nullopt;  // overflow
        delta += (m - n) * (handled + 1);
        n = m;
        for (uint32_t cp : input) {
            if (cp < n && ++delta == 0) return std::nullopt;
            if (cp == n) {
                uint32_t q = delta;
                for (uint32_t k = kBase;; k += kBase) {
                    uint32_t t = k <= bias ? kTmin : (k >= bias + kTmax ? kTmax : k - bias);
                    if (q < t) break;
                    out += digit_char(t + (q - t) % (kBase - t));
                    q = (q - t) / (kBase - t);
                }
                out += digit_char(q);
                bias = adapt(delta, handled + 1, handled == basic);
                delta = 0;
                ++handled;
            }
        }
        ++delta;
        ++n;
    }
    return "xn--" + out;
}

}  // namespace cenprobe::punycode
