#pragma once

namespace floqep {

inline constexpr const char* kToolName = "floqep";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace floqep
