#pragma once

namespace semivalue {

inline constexpr const char* kToolName = "semivalue";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace semivalue
