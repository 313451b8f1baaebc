#pragma once

namespace bicwave {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bicwave
