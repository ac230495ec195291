#pragma once

namespace decbench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace decbench
