#pragma once

namespace nvpol {
inline constexpr const char* kVersion = "1.0.0";
}
