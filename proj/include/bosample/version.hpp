#pragma once

namespace bosample {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bosample
