#pragma once

#include <cmath>
#include <numbers>

#include "ssloc/errors.hpp"

namespace ssloc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    if (!std::isfinite(a)) throw validation_error("wrap_angle: non-finite angle");
    double w = std::remainder(a, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

/// Source azimuth seen from the rotated array heading: psi = phi - beta,
/// wrapped to (-pi, pi]. For a clockwise spin beta(t) = omega*t this is
/// psi(t) = phi - omega*t.
inline double psi_of(double phi, double beta) { return wrap_angle(phi - beta); }

/// Far-field path-length difference between the two microphones for a
/// source at elevation theta and array-relative azimuth psi:
///   d = b * cos(theta) * sin(psi).
inline double true_path_difference_3d(double theta, double psi, double b) {
    if (!(b > 0.0)) throw validation_error("true_path_difference_3d: baseline must be > 0");
    return b * std::cos(theta) * std::sin(psi);
}

/// Path-length difference after the array, already facing the source, has
/// translated laterally by delta_d:
///   d' = b * delta_d / sqrt(delta_d^2 + D^2).
/// Odd in delta_d; monotone decreasing in D for fixed delta_d > 0.
inline double true_path_difference_distance(double D, double delta_d, double b) {
    if (!(b > 0.0)) throw validation_error("true_path_difference_distance: baseline must be > 0");
    if (!(D > 0.0)) throw validation_error("true_path_difference_distance: distance must be > 0");
    return b * delta_d / std::hypot(delta_d, D);
}

}  // namespace ssloc
