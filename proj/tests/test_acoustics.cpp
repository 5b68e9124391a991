#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "ssloc/room.hpp"
#include "ssloc/synth.hpp"

using namespace ssloc;

namespace {

// Brute-force mirror construction: reflect across all six planes until the
// bounce budget is used up, keeping the smallest reflection count per
// position.
std::map<std::array<long, 3>, int> brute_force_images(const RoomConfig& room,
                                                      const Vec3& src, int order) {
    auto key = [](const Vec3& p) {
        return std::array<long, 3>{std::lround(p[0] * 1e6), std::lround(p[1] * 1e6),
                                   std::lround(p[2] * 1e6)};
    };
    std::map<std::array<long, 3>, int> found;
    std::vector<Vec3> frontier{src};
    found[key(src)] = 0;
    for (int n = 1; n <= order; ++n) {
        std::vector<Vec3> next;
        for (const auto& p : frontier) {
            for (int axis = 0; axis < 3; ++axis) {
                for (double plane : {0.0, room.dimensions_m[axis]}) {
                    Vec3 q = p;
                    q[axis] = 2.0 * plane - p[axis];
                    auto k = key(q);
                    if (!found.count(k)) {
                        found[k] = n;
                        next.push_back(q);
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    return found;
}

ChannelPair render_static(const RoomConfig& room, const SourceTruth& src,
                          const ArrayPose& pose, const SignalConfig& sig,
                          std::size_t samples) {
    return synthesize_pair(room, src, {pose}, {0, samples}, sig);
}

}  // namespace

TEST_CASE("image enumeration: direct path and first order") {
    RoomConfig room;
    Vec3 src = {12.0, 9.0, 11.0};

    auto direct = image_sources(room, src, 0);
    REQUIRE(direct.size() == 1);
    CHECK(direct[0].reflection_gain == doctest::Approx(1.0));
    CHECK(direct[0].order == 0);

    // direct path gain toward a receiver is 1/r
    Vec3 mic = {10.0, 10.0, 10.0};
    auto c = path_to(direct[0], mic, room.sound_speed_mps);
    const double r = norm3(sub3(src, mic));
    CHECK(c.gain == doctest::Approx(1.0 / r));
    CHECK(c.delay_s == doctest::Approx(r / room.sound_speed_mps));

    auto first = image_sources(room, src, 1);
    CHECK(first.size() == 7);  // direct + one image per surface
    int order1 = 0;
    for (const auto& img : first) order1 += img.order == 1 ? 1 : 0;
    CHECK(order1 == 6);
}

TEST_CASE("image enumeration matches the brute-force mirror construction") {
    RoomConfig room;
    room.dimensions_m = {20.0, 20.0, 20.0};
    room.max_image_order = 3;
    Vec3 src = {15.0, 10.0, 10.0};

    for (int order = 0; order <= 3; ++order) {
        auto mine = image_sources(room, src, order);
        auto oracle = brute_force_images(room, src, order);
        CHECK(mine.size() == oracle.size());
        for (const auto& img : mine) {
            std::array<long, 3> k{std::lround(img.position[0] * 1e6),
                                  std::lround(img.position[1] * 1e6),
                                  std::lround(img.position[2] * 1e6)};
            REQUIRE(oracle.count(k) == 1);
            CHECK(oracle[k] == img.order);
            // uniform coefficients: reflection product is 0.5^order
            CHECK(img.reflection_gain ==
                  doctest::Approx(std::pow(0.5, img.order)).epsilon(1e-12));
        }
    }
}

TEST_CASE("first-order floor image gain is 0.5 / r_image") {
    RoomConfig room;  // 20^3, all coefficients 0.5
    // source 5 m in front of the robot at the room center
    Vec3 src = {15.0, 10.0, 10.0};
    Vec3 mic = room.center();

    auto images = image_sources(room, src, 1);
    const Vec3 floor_image = {15.0, 10.0, -10.0};
    bool seen = false;
    for (const auto& img : images) {
        if (std::abs(img.position[2] - floor_image[2]) < 1e-9 &&
            std::abs(img.position[0] - floor_image[0]) < 1e-9) {
            seen = true;
            const double r_image = norm3(sub3(floor_image, mic));
            CHECK(r_image == doctest::Approx(std::sqrt(425.0)));
            CHECK(path_to(img, mic, room.sound_speed_mps).gain ==
                  doctest::Approx(0.5 / r_image));
        }
    }
    CHECK(seen);
}

TEST_CASE("sources outside the room are rejected") {
    RoomConfig room;
    CHECK_THROWS_AS(image_sources(room, {21.0, 10.0, 10.0}, 1), validation_error);
    CHECK_THROWS_AS(image_sources(room, {10.0, 0.0, 10.0}, 1), validation_error);
    CHECK_THROWS_AS(image_sources(room, {10.0, 10.0, 10.0}, 5), validation_error);
}

TEST_CASE("reflected paths carry less energy than the direct path") {
    RoomConfig room;
    Vec3 src = {14.0, 8.0, 12.0};
    Vec3 mic = room.center();
    auto images = image_sources(room, src, 2);
    double direct_gain = 0.0;
    for (const auto& img : images)
        if (img.order == 0) direct_gain = path_to(img, mic, room.sound_speed_mps).gain;
    REQUIRE(direct_gain > 0.0);
    for (const auto& img : images)
        if (img.order > 0)
            CHECK(path_to(img, mic, room.sound_speed_mps).gain < direct_gain);
}

TEST_CASE("ideal series: elevation 90 gives a flat zero series") {
    SourceTruth src{7.0, deg_to_rad(90.0), deg_to_rad(150.0)};
    RotationSchedule sched;
    auto series = ideal_itd_series(src, sched, 0.18, 0.0, 1);
    CHECK(series.samples.size() == 1080);
    for (const auto& s : series.samples)
        CHECK(std::abs(s.d_measured_m) < 1e-15);
}

TEST_CASE("ideal series: zero elevation reproduces b*sin(psi) exactly") {
    SourceTruth src{5.0, 0.0, deg_to_rad(50.0)};
    RotationSchedule sched;
    auto series = ideal_itd_series(src, sched, 0.18, 0.0, 1);
    for (const auto& s : series.samples) {
        const double psi = psi_of(src.azimuth_rad, s.beta_rad);
        CHECK(s.d_measured_m == 0.18 * std::sin(psi));
    }
}

TEST_CASE("ideal series: sample count and amplitude at 50 deg elevation") {
    SourceTruth src{5.0, deg_to_rad(50.0), deg_to_rad(20.0)};
    RotationSchedule sched;  // omega = 2*pi/5, 1 deg cadence, 3 revolutions
    auto series = ideal_itd_series(src, sched, 0.18, 0.0, 2);
    REQUIRE(series.samples.size() == 1080);
    double peak = 0.0;
    for (const auto& s : series.samples) peak = std::max(peak, std::abs(s.d_measured_m));
    CHECK(peak == doctest::Approx(0.18 * std::cos(deg_to_rad(50.0))).epsilon(1e-4));
    CHECK(peak == doctest::Approx(0.1157).epsilon(1e-3));

    CHECK_THROWS_AS(ideal_itd_series(src, sched, 0.18, -0.1, 2), validation_error);
}

TEST_CASE("ideal series are reproducible under a fixed seed") {
    SourceTruth src{5.0, deg_to_rad(20.0), deg_to_rad(50.0)};
    RotationSchedule sched;
    auto a = ideal_itd_series(src, sched, 0.18, 0.01, 42);
    auto b = ideal_itd_series(src, sched, 0.18, 0.01, 42);
    auto c = ideal_itd_series(src, sched, 0.18, 0.01, 43);
    REQUIRE(a.samples.size() == b.samples.size());
    bool all_equal = true, differs_from_c = false;
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        all_equal &= a.samples[k].d_measured_m == b.samples[k].d_measured_m;
        differs_from_c |= a.samples[k].d_measured_m != c.samples[k].d_measured_m;
    }
    CHECK(all_equal);
    CHECK(differs_from_c);
}

TEST_CASE("translation series follows the exact facing geometry") {
    SourceTruth src{5.0, deg_to_rad(20.0), deg_to_rad(50.0)};
    TranslationPlan plan;
    auto series = ideal_translation_series(src, plan, 0.18, src.azimuth_rad, 0.0, 1);
    REQUIRE(series.samples.size() == 200);
    for (const auto& s : series.samples) {
        const double expected =
            true_path_difference_distance(src.distance_m, s.offset_m, 0.18);
        CHECK(s.d_measured_m == doctest::Approx(expected).epsilon(1e-9));
    }
    // a facing error biases the measured series away from the ideal model
    auto biased = ideal_translation_series(src, plan, 0.18,
                                           src.azimuth_rad + deg_to_rad(2.0), 0.0, 1);
    CHECK(std::abs(biased.samples.front().d_measured_m) > 1e-4);
}

TEST_CASE("broadside rendering: both channels identical with zero noise") {
    RoomConfig room;
    room.max_image_order = 0;
    SourceTruth src{5.0, 0.0, 0.0};  // dead ahead
    SignalConfig sig;
    sig.sensor_noise_sigma = 0.0;
    sig.seed = 3;
    auto pair = render_static(room, src, ArrayPose{0.0, 0.0, 0.18}, sig, 4096);
    double max_diff = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < pair.left.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(pair.left[i] - pair.right[i]));
        max_abs = std::max(max_abs, std::abs(pair.left[i]));
    }
    CHECK(max_abs > 0.0);
    CHECK(max_diff < 1e-9 * std::max(1.0, max_abs));
}

TEST_CASE("rendering is deterministic and the parallel kernel matches the serial one") {
    RoomConfig room;
    SourceTruth src{5.0, deg_to_rad(20.0), deg_to_rad(50.0)};
    RotationSchedule sched;
    sched.revolutions = 0.05;  // 18 frames
    SignalConfig sig;
    sig.sensor_noise_sigma = 0.05;
    sig.seed = 11;
    FramePlan plan = rotation_frame_plan(sched, 0.18, sig.sample_rate_hz);

    auto a = synthesize_pair(room, src, plan.poses, plan.edges, sig);
    auto b = synthesize_pair(room, src, plan.poses, plan.edges, sig);
    auto ref = synthesize_pair_reference(room, src, plan.poses, plan.edges, sig);
    REQUIRE(a.left.size() == ref.left.size());
    bool same = true;
    for (std::size_t i = 0; i < a.left.size(); ++i) {
        same &= a.left[i] == b.left[i];
        same &= a.left[i] == ref.left[i];
        same &= a.right[i] == ref.right[i];
    }
    CHECK(same);
}

TEST_CASE("frame plans tile the waveform") {
    RotationSchedule sched;
    FramePlan plan = rotation_frame_plan(sched, 0.18, 44100.0);
    REQUIRE(plan.poses.size() == 1080);
    REQUIRE(plan.edges.size() == 1081);
    CHECK(plan.edges.front() == 0);
    CHECK(plan.edges.back() == 661500);
    for (std::size_t f = 0; f + 1 < plan.edges.size(); ++f)
        CHECK(plan.edges[f + 1] > plan.edges[f]);
}
