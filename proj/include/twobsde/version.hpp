#pragma once

namespace twobsde {
inline constexpr const char* kVersion = "0.1.0";
}
