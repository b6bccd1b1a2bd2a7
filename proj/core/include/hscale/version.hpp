#pragma once

namespace hscale {
inline constexpr const char* kVersion = "0.1.0";
}
