#pragma once

namespace ising {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace ising
