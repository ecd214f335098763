#pragma once

#include <numbers>

namespace omit::constants {

inline constexpr double hbar = 1.054571817e-34;    // J s (exact, SI 2019)
inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

} // namespace omit::constants
