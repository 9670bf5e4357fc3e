#pragma once

namespace trdevdiv {

inline constexpr const char* kToolName = "trdevdiv";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace trdevdiv
