#pragma once

namespace coilsim {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMu0 = 4.0e-7 * kPi;  // vacuum permeability [H/m]
inline constexpr double kInch = 0.0254;       // [m]

inline constexpr char kVersion[] = "coilsim 0.1.0";

// Engineering-unit helpers used at the config/CLI boundary.
// Everything past that boundary is SI.
constexpr double from_mm(double v) { return v * 1e-3; }
constexpr double to_mm(double v) { return v * 1e3; }
constexpr double from_ms(double v) { return v * 1e-3; }
constexpr double to_ms(double v) { return v * 1e3; }
constexpr double from_us(double v) { return v * 1e-6; }
constexpr double to_us(double v) { return v * 1e6; }
constexpr double from_uH(double v) { return v * 1e-6; }
constexpr double to_uH(double v) { return v * 1e6; }
constexpr double from_grams(double v) { return v * 1e-3; }
constexpr double to_grams(double v) { return v * 1e3; }

}  // namespace coilsim
