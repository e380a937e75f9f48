#pragma once

namespace depmix {

inline constexpr const char* kVersion = "0.1.0";

} // namespace depmix
