#pragma once

namespace qvs {

inline constexpr const char* kVersion = "0.1.0";

}
