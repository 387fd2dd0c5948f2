#pragma once

namespace mcd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mcd
