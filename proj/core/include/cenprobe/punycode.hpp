#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cenprobe::punycode {

// Decodes UTF-8 to codepoints and applies RFC 3492 encoding. Returns the
// label unchanged when it is pure ASCII, otherwise the "xn--" form.
// nullopt on invalid UTF-8 or a label that cannot be encoded.
std::optional<std::string> encode_label(std::string_view utf8_label);

}  // namespace cenprobe::punycode
