#pragma once

namespace tampersim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tampersim
