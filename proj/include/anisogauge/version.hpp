#pragma once

namespace anisogauge {

inline constexpr const char* kVersion = "0.1.0";

} // namespace anisogauge
