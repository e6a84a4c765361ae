#pragma once

namespace afgm {
inline constexpr const char* kVersion = "0.1.0";
}
