#pragma once

namespace fub {

inline constexpr const char* kToolVersion = "0.1.0";

}
