#pragma once

namespace jigsawbench {

inline constexpr const char* kToolName = "jigsawbench";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace jigsawbench
