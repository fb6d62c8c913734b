#pragma once

namespace cfmarc {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace cfmarc
