#pragma once

#include <numbers>

namespace soop {

inline constexpr double kPi = std::numbers::pi;

/// Propagation speed used for time-to-space conversions.
///
/// `Rounded` is 3e8 m/s, the value behind the reference path losses and
/// delay-to-range conversions; `Exact` is the SI value. Conversions default to `Rounded`.
enum class LightSpeed { Rounded, Exact };

inline constexpr double kSpeedOfLightRounded = 3.0e8;
inline constexpr double kSpeedOfLightExact = 299792458.0;

constexpr double speed_of_light(LightSpeed mode = LightSpeed::Rounded) {
    return mode == LightSpeed::Exact ? kSpeedOfLightExact : kSpeedOfLightRounded;
}

// 10*log10(k_B) in dBW/(K*Hz)
inline constexpr double kBoltzmannDbWPerKHz = -228.601;

// WGS-84
inline constexpr double kWgs84SemiMajorAxisM = 6378137.0;
inline constexpr double kWgs84Flattening = 1.0 / 298.257223563;

inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace soop
