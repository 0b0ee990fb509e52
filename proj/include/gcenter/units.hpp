#pragma once

// Energies are carried in meV throughout the library; everything else here is
// an I/O conversion.
namespace gcenter::units {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kUevPerMev = 1e3;
inline constexpr double kGhzPerMev = 241.799;
/// E[meV] = kHcMevNm / lambda[nm]
inline constexpr double kHcMevNm = 1239.841984e3;
inline constexpr double kBoltzmannMevPerK = 8.617333262e-2;

constexpr double ueV_to_meV(double ueV) { return ueV / kUevPerMev; }
constexpr double meV_to_ueV(double meV) { return meV * kUevPerMev; }
constexpr double meV_to_GHz(double meV) { return meV * kGhzPerMev; }
constexpr double GHz_to_meV(double ghz) { return ghz / kGhzPerMev; }

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Reduces an angle to [0, 180), the period of a polarization diagram.
double wrap_half_turn_deg(double deg);

/// Reduces an angle difference to (-90, 90].
double angle_difference_deg(double a, double b);

}  // namespace gcenter::units
