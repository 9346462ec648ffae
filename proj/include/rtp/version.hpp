#pragma once

namespace rtp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rtp
