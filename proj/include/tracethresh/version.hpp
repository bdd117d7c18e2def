#pragma once

namespace tracethresh {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tracethresh
