#pragma once

namespace steerkit {

inline constexpr const char* version = "0.1.0";

}  // namespace steerkit
