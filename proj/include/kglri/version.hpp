#pragma once

namespace kglri {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace kglri
