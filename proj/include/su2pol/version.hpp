#pragma once

namespace su2pol {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace su2pol
