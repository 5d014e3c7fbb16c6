#pragma once

namespace zmap {
inline constexpr const char* kVersion = "0.1.0";
}
