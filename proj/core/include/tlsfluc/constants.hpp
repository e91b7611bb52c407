#pragma once

namespace tlsfluc {

// CODATA / exact SI values.
inline constexpr double k_hbar = 1.054571817e-34;    // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
inline constexpr double k_pi = 3.14159265358979323846;

inline constexpr const char* k_tool_version = "0.1.0";

}  // namespace tlsfluc
