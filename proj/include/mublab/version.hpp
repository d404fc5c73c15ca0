#pragma once

namespace mublab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mublab
