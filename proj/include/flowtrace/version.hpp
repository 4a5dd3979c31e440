#pragma once

namespace flowtrace {

inline constexpr const char* kToolName = "flowtrace";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace flowtrace
