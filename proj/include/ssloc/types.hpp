#pragma once

#include <array>
#include <cmath>

#include "ssloc/angles.hpp"
#include "ssloc/errors.hpp"

namespace ssloc {

using Vec3 = std::array<double, 3>;

inline double norm3(const Vec3& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

inline Vec3 sub3(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline double dot3(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Unit vector at clockwise angle `a` from the +x robot heading, in the
/// horizontal plane (z up). Clockwise seen from above maps +x toward -y.
inline Vec3 heading_vec(double a) { return {std::cos(a), -std::sin(a), 0.0}; }

/// Ground-truth source location relative to the robot center:
/// distance D, elevation theta in [0, pi/2], azimuth phi in (-pi, pi]
/// measured clockwise from the robot heading.
struct SourceTruth {
    double distance_m = 5.0;
    double elevation_rad = 0.0;
    double azimuth_rad = 0.0;

    void validate() const {
        if (!(distance_m > 0.0)) throw validation_error("source: distance must be > 0");
        if (elevation_rad < 0.0 || elevation_rad > kPi / 2.0 + 1e-12)
            throw validation_error("source: elevation must lie in [0, 90] deg");
        if (azimuth_rad <= -kPi - 1e-12 || azimuth_rad > kPi + 1e-12)
            throw validation_error("source: azimuth must lie in (-180, 180] deg");
    }

    /// Unit direction from the robot center toward the source.
    Vec3 direction() const {
        const double ct = std::cos(elevation_rad);
        return {ct * std::cos(azimuth_rad), -ct * std::sin(azimuth_rad),
                std::sin(elevation_rad)};
    }

    /// Source position relative to the robot center.
    Vec3 position() const {
        Vec3 u = direction();
        return {u[0] * distance_m, u[1] * distance_m, u[2] * distance_m};
    }
};

/// Instantaneous pose of the microphone pair: heading angle beta
/// (clockwise from the robot heading), lateral offset of the array center
/// from the robot center, and baseline b. The offset is applied along the
/// left-hand perpendicular of the heading, the direction used by the
/// translation stage.
struct ArrayPose {
    double beta_rad = 0.0;
    double offset_m = 0.0;
    double baseline_m = 0.18;

    void validate() const {
        if (!(baseline_m > 0.0)) throw validation_error("array: baseline must be > 0");
        if (offset_m < 0.0) throw validation_error("array: offset must be >= 0");
    }

    /// Array center relative to the robot center.
    Vec3 center() const {
        Vec3 left = heading_vec(beta_rad - kPi / 2.0);
        return {offset_m * left[0], offset_m * left[1], 0.0};
    }

    /// Microphone positions relative to the robot center; first = left,
    /// second = right. The mic axis is the right-hand perpendicular of the
    /// heading, so a source dead ahead gives zero path difference.
    std::array<Vec3, 2> mic_positions() const {
        Vec3 c = center();
        Vec3 axis = heading_vec(beta_rad + kPi / 2.0);
        const double h = baseline_m / 2.0;
        Vec3 left = {c[0] - h * axis[0], c[1] - h * axis[1], c[2]};
        Vec3 right = {c[0] + h * axis[0], c[1] + h * axis[1], c[2]};
        return {left, right};
    }
};

/// Far-field path difference (left-mic distance minus right-mic distance)
/// for an arbitrary pose, from exact vector geometry. With zero offset this
/// reduces to b*cos(theta)*sin(phi - beta); with the array facing the source
/// it reduces to the lateral-translation model.
inline double path_difference_exact(const SourceTruth& src, const ArrayPose& pose) {
    Vec3 u = sub3(src.position(), pose.center());
    const double n = norm3(u);
    Vec3 axis = heading_vec(pose.beta_rad + kPi / 2.0);
    return pose.baseline_m * dot3(u, axis) / n;
}

/// Clockwise spin of the array: rate omega, number of full revolutions,
/// and the rotation increment between successive ITD samples.
struct RotationSchedule {
    double omega_rad_s = kTwoPi / 5.0;
    double revolutions = 3.0;
    double cadence_rad = deg_to_rad(1.0);

    void validate() const {
        if (!(omega_rad_s > 0.0)) throw validation_error("schedule: omega must be > 0");
        if (!(cadence_rad > 0.0)) throw validation_error("schedule: cadence must be > 0");
        if (!(revolutions > 0.0)) throw validation_error("schedule: revolutions must be > 0");
    }

    int sample_count() const {
        return static_cast<int>(std::round(revolutions * kTwoPi / cadence_rad));
    }
    /// Time between successive ITD samples.
    double sample_period_s() const { return cadence_rad / omega_rad_s; }
};

/// Lateral translation stage: fixed number of equal steps, one ITD sample
/// per step.
struct TranslationPlan {
    double step_m = 0.0007;
    int steps = 200;
    double step_period_s = (kTwoPi / 360.0) / (kTwoPi / 5.0);  // one rotation frame

    void validate() const {
        if (!(step_m > 0.0)) throw validation_error("translation: step must be > 0");
        if (steps < 1) throw validation_error("translation: steps must be >= 1");
        if (!(step_period_s > 0.0)) throw validation_error("translation: period must be > 0");
    }
};

}  // namespace ssloc
