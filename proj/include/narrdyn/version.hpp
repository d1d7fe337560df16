#pragma once

namespace narrdyn {

inline constexpr const char* kToolName = "narrdyn";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace narrdyn
