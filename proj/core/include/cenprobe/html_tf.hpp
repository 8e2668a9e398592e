#pragma once

#include <map>
#include <string>
#include <string_view>

namespace cenprobe {

/// Sparse term-frequency vector over HTML element names (lowercase).
/// Counts start tags only; attributes, text, end tags and comments are
/// ignored. A non-HTML body yields an empty vector.
using TagTfVector = std::map<std::string, int>;

// Tolerant tag scan: unterminated tags, stray '<' and raw-text elements
// (script/style/textarea/title) are handled the way browsers do.
TagTfVector html_tag_tf(std::string_view body);

// Standard cosine over the sparse vectors. Both empty -> 1.0, exactly one
// empty -> 0.0. Result is clamped to [0, 1].
double cosine_similarity(const TagTfVector& a, const TagTfVector& b);

}  // namespace cenprobe
