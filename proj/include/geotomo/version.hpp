#pragma once

namespace geotomo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace geotomo
