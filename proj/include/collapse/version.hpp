#pragma once

namespace collapse {

inline constexpr const char* kArtifactName = "collapse-sim";
inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace collapse
