#pragma once

namespace lsinf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lsinf
