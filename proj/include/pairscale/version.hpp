#pragma once

#define PAIRSCALE_VERSION "0.1.0"

namespace pairscale {
inline constexpr const char* kToolkitVersion = PAIRSCALE_VERSION;
}
