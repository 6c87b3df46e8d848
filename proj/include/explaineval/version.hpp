#pragma once

namespace explaineval {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace explaineval
