#pragma once

#include <string_view>

namespace bessmarket {

inline constexpr std::string_view kToolName = "bessmarket";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace bessmarket
