#pragma once

namespace gcenter {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gcenter
