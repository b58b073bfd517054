#pragma once

#include <string_view>

namespace pseudovoc {

inline constexpr std::string_view kToolName = "pseudovoc";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace pseudovoc
