#pragma once

namespace cenprobe {

inline constexpr const char* kVersion = "0.1.0";

// Bumped whenever the JSON report layout changes incompatibly.
inline constexpr int kReportSchemaVersion = 1;

}  // namespace cenprobe
