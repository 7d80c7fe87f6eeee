#pragma once

namespace tscf {

inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace tscf
