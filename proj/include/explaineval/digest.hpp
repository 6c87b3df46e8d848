#pragma once
// SHA-256 helpers (hex-encoded).

#include <string>
#include <string_view>

namespace explaineval {

std::string sha256_hex(std::string_view data);

}  // namespace explaineval
