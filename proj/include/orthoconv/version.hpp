#pragma once

namespace orthoconv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace orthoconv
