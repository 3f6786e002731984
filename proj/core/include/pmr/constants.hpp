#pragma once

#include <numbers>

namespace pmr {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Round-trip delay for a one-way range.
constexpr double range_to_delay(double range_m) { return 2.0 * range_m / kSpeedOfLight; }
constexpr double delay_to_range(double delay_s) { return 0.5 * kSpeedOfLight * delay_s; }

}  // namespace pmr
