#pragma once

namespace gfchan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gfchan
