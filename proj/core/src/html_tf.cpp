#include "cenprobe/html_tf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace cenprobe {

namespace {

bool is_name_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == ':';
}

char lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

// Position just past the closing '>' of the current tag, honoring quoted
// attribute values. Unterminated tag -> npos.
size_t skip_tag(std::string_view s, size_t i) {
    char quote = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            return i + 1;
        }
    }
    return std::string_view::npos;
}

bool is_rawtext_element(std::string_view name) {
    return name == "script" || name == "style" || name == "textarea" || name == "title";
}

// Finds "</name" case-insensitively starting at i; npos means the raw text
// runs to the end of the document.
size_t find_rawtext_end(std::string_view s, size_t i, std::string_view name) {
    while (i < s.size()) {
        size_t lt = s.find('<', i);
        if (lt == std::string_view::npos || lt + 1 >= s.size()) return std::string_view::npos;
        if (s[lt + 1] == '/' && lt + 2 + name.size() <= s.size()) {
            bool match = true;
            for (size_t k = 0; k < name.size(); ++k) {
                if (lower(s[lt + 2 + k]) != name[k]) {
                    match = false;
                    break;
                }
            }
            if (match) return lt;
        }
        i = lt + 1;
    }
    return std::string_view::npos;
}

}  // namespace

TagTfVector html_tag_tf(std::string_view body) {
    TagTfVector tf;
    size_t i = 0;
    while (i < body.size()) {
        size_t lt = body.find('<', i);
        if (lt == std::string_view::npos || lt + 1 >= body.size()) break;
        char next = body[lt + 1];

        if (next == '!') {
            // Comment, doctype or CDATA.
            if (body.compare(lt, 4, "<!--") == 0) {
                size_t end = body.find("-->", lt + 4);
                i = end == std::string_view::npos ? body.size() : end + 3;
            } else {
                size_t end = body.find('>', lt);
                i = end == std::string_view::npos ? body.size() : end + 1;
            }
            continue;
        }
        if (next == '?' || next == '/') {
            // Processing instruction or end tag: skip, end tags are not counted.
            size_t end = body.find('>', lt);
            i = end == std::string_view::npos ? body.size() : end + 1;
            continue;
        }
        if (!is_name_start(next)) {
            i = lt + 1;  // stray '<'
            continue;
        }

        size_t name_end = lt + 1;
        while (name_end < body.size() && is_name_char(body[name_end])) ++name_end;
        std::string name;
        name.reserve(name_end - lt - 1);
        for (size_t k = lt + 1; k < name_end; ++k) name += lower(body[k]);
        ++tf[name];

        size_t after = skip_tag(body, name_end);
        if (after == std::string_view::npos) break;  // truncated document
        i = after;

        bool self_closing = after >= 2 && body[after - 2] == '/';
        if (!self_closing && is_rawtext_element(name)) {
            size_t end = find_rawtext_end(body, after, name);
            if (end == std::string_view::npos) break;
            size_t close = body.find('>', end);
            i = close == std::string_view::npos ? body.size() : close + 1;
        }
    }
    return tf;
}

double cosine_similarity(const TagTfVector& a, const TagTfVector& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [tag, count] : a) {
        na += static_cast<double>(count) * count;
        auto it = b.find(tag);
        if (it != b.end()) dot += static_cast<double>(count) * it->second;
    }
    for (const auto& [tag, count] : b) nb += static_cast<double>(count) * count;
    double denom = std::sqrt(na) * std::sqrt(nb);
    if (denom == 0.0) return 0.0;
    return std::clamp(dot / denom, 0.0, 1.0);
}

}  // namespace cenprobe
