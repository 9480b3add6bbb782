#pragma once

namespace tacmap {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace tacmap
