#pragma once

namespace bandspin {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bandspin
