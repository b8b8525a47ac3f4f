#pragma once

namespace turbstab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace turbstab
