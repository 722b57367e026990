#pragma once

namespace tmhf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tmhf
