#pragma once

#include <vector>

#include "ssloc/types.hpp"

namespace ssloc {

/// Rectangular room spanning [0, Lx] x [0, Ly] x [0, Lz]. Reflection
/// coefficients are per surface pair for the side walls and individual for
/// floor (z = 0) and ceiling (z = Lz).
struct RoomConfig {
    Vec3 dimensions_m = {20.0, 20.0, 20.0};
    double wall_reflection = 0.5;
    double floor_reflection = 0.5;
    double ceiling_reflection = 0.5;
    double sound_speed_mps = 345.0;
    int max_image_order = 2;

    void validate() const;

    Vec3 center() const {
        return {dimensions_m[0] / 2.0, dimensions_m[1] / 2.0, dimensions_m[2] / 2.0};
    }
};

/// One mirror image of the source: absolute position (room frame) and the
/// product of the reflection coefficients picked up along its bounce
/// sequence. Distance attenuation is applied per receiver.
struct ImageSource {
    Vec3 position;
    double reflection_gain;
    int order;
};

/// Enumerates all mirror images of `src` (room frame) with total reflection
/// order <= `order`. Order 0 is the direct path with reflection gain 1.
std::vector<ImageSource> image_sources(const RoomConfig& room, const Vec3& src, int order);

/// Per-receiver contribution of one image: gain = reflection product / r,
/// delay = r / c0.
struct PathContribution {
    double gain;
    double delay_s;
};

inline PathContribution path_to(const ImageSource& img, const Vec3& mic, double c0) {
    const double r = norm3(sub3(img.position, mic));
    return {img.reflection_gain / r, r / c0};
}

}  // namespace ssloc
