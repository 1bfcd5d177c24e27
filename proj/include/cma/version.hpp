#pragma once

namespace cma {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace cma
