#pragma once

namespace plrx {

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kFreeSpaceImpedance = 376.730313668; // ohm
inline constexpr double kMu0 = 1.25663706212e-6;             // H/m
inline constexpr double kPi = 3.14159265358979323846;

/// Common complex-baseband grid; transient timesteps divide it exactly.
inline constexpr double kBasebandRate = 128e6; // S/s

} // namespace plrx
