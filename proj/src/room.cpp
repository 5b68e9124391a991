#include "ssloc/room.hpp"

#include <cmath>
#include <cstdlib>

namespace ssloc {

void RoomConfig::validate() const {
    for (double d : dimensions_m)
        if (!(d > 0.0)) throw validation_error("room: dimensions must be > 0");
    for (double r : {wall_reflection, floor_reflection, ceiling_reflection})
        if (r < 0.0 || r >= 1.0)
            throw validation_error("room: reflection coefficients must lie in [0, 1)");
    if (!(sound_speed_mps > 0.0)) throw validation_error("room: sound speed must be > 0");
    if (max_image_order < 0) throw validation_error("room: image order must be >= 0");
}

namespace {

// Per-axis mirror images of coordinate x in [0, L]. An image is indexed by
// (m, sigma): position 2*m*L + sigma*x. Reflection counts off the low wall
// (n0) and high wall (n1):
//   sigma = +1            -> n0 = |m|, n1 = |m|
//   sigma = -1 and m >= 1 -> n0 = m - 1, n1 = m
//   sigma = -1 and m <= 0 -> n0 = 1 - m, n1 = -m
struct AxisImage {
    double pos;
    int n_low;
    int n_high;
};

void axis_images(double x, double L, int max_order, std::vector<AxisImage>& out) {
    out.clear();
    const int m_span = max_order / 2 + 1;
    for (int m = -m_span; m <= m_span; ++m) {
        {
            const int n = std::abs(m);
            if (2 * n <= max_order) out.push_back({2.0 * m * L + x, n, n});
        }
        {
            int n_low, n_high;
            if (m >= 1) {
                n_low = m - 1;
                n_high = m;
            } else {
                n_low = 1 - m;
                n_high = -m;
            }
            if (n_low + n_high <= max_order) out.push_back({2.0 * m * L - x, n_low, n_high});
        }
    }
}

}  // namespace

std::vector<ImageSource> image_sources(const RoomConfig& room, const Vec3& src, int order) {
    room.validate();
    if (order > room.max_image_order)
        throw validation_error("image_sources: order exceeds configured max_image_order");
    for (int a = 0; a < 3; ++a)
        if (!(src[a] > 0.0 && src[a] < room.dimensions_m[a]))
            throw validation_error("image_sources: source must lie strictly inside the room");

    std::vector<AxisImage> xs, ys, zs;
    axis_images(src[0], room.dimensions_m[0], order, xs);
    axis_images(src[1], room.dimensions_m[1], order, ys);
    axis_images(src[2], room.dimensions_m[2], order, zs);

    std::vector<ImageSource> images;
    for (const auto& ix : xs) {
        const int ox = ix.n_low + ix.n_high;
        for (const auto& iy : ys) {
            const int oy = iy.n_low + iy.n_high;
            if (ox + oy > order) continue;
            for (const auto& iz : zs) {
                const int total = ox + oy + iz.n_low + iz.n_high;
                if (total > order) continue;
                const double gain =
                    std::pow(room.wall_reflection,
                             ix.n_low + ix.n_high + iy.n_low + iy.n_high) *
                    std::pow(room.floor_reflection, iz.n_low) *
                    std::pow(room.ceiling_reflection, iz.n_high);
                images.push_back({{ix.pos, iy.pos, iz.pos}, gain, total});
            }
        }
    }
    return images;
}

}  // namespace ssloc
