#include <doctest.h>

#include <cmath>
#include <random>

#include "ssloc/angles.hpp"
#include "ssloc/types.hpp"

using namespace ssloc;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
    CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
    CHECK(wrap_angle(kPi + 0.1) == doctest::Approx(-kPi + 0.1));
    CHECK(wrap_angle(-3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng);
        const double w = wrap_angle(a);
        CHECK(w > -kPi);
        CHECK(w <= kPi + 1e-15);
        CHECK(std::remainder(a - w, kTwoPi) == doctest::Approx(0.0).epsilon(1e-9));
    }

    CHECK_THROWS_AS(wrap_angle(std::nan("")), validation_error);
    CHECK_THROWS_AS(wrap_angle(INFINITY), validation_error);
}

TEST_CASE("psi_of subtracts the rotation angle and wraps") {
    CHECK(psi_of(deg_to_rad(30.0), 0.0) == doctest::Approx(deg_to_rad(30.0)));
    CHECK(psi_of(deg_to_rad(30.0), deg_to_rad(30.0)) == doctest::Approx(0.0));
    // oracle: wrap_angle(-170 deg - 30 deg) = 160 deg
    CHECK(psi_of(deg_to_rad(-170.0), deg_to_rad(30.0)) ==
          doctest::Approx(deg_to_rad(160.0)));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 2000; ++i) {
        const double phi = u(rng), beta = u(rng);
        const double back = wrap_angle(psi_of(phi, beta) + beta);
        CHECK(back == doctest::Approx(wrap_angle(phi)).epsilon(1e-9));
    }
}

TEST_CASE("true_path_difference_3d matches the closed form") {
    CHECK(true_path_difference_3d(0.0, deg_to_rad(90.0), 0.18) == doctest::Approx(0.18));
    CHECK(true_path_difference_3d(deg_to_rad(90.0), deg_to_rad(37.0), 0.18) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(true_path_difference_3d(deg_to_rad(50.0), deg_to_rad(30.0), 0.18) ==
          doctest::Approx(0.0578509).epsilon(1e-5));

    CHECK_THROWS_AS(true_path_difference_3d(0.1, 0.1, 0.0), validation_error);
    CHECK_THROWS_AS(true_path_difference_3d(0.1, 0.1, -1.0), validation_error);
}

TEST_CASE("path difference is bounded by the baseline") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> theta(0.0, kPi / 2.0);
    std::uniform_real_distribution<double> psi(-kPi, kPi);
    std::uniform_real_distribution<double> base(0.01, 1.0);
    for (int i = 0; i < 5000; ++i) {
        const double b = base(rng);
        CHECK(std::abs(true_path_difference_3d(theta(rng), psi(rng), b)) <= b + 1e-12);
    }
}

TEST_CASE("zero elevation reduces to the planar output b*sin(psi)") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> psi(-kPi, kPi);
    for (int i = 0; i < 1000; ++i) {
        const double p = psi(rng);
        CHECK(true_path_difference_3d(0.0, p, 0.18) == 0.18 * std::sin(p));
    }
}

TEST_CASE("true_path_difference_distance matches the triangle geometry") {
    CHECK(true_path_difference_distance(5.0, 0.0, 0.3) == doctest::Approx(0.0));
    // oracle: 0.3 * 0.14 / sqrt(0.14^2 + 25) = 0.0083967
    CHECK(true_path_difference_distance(5.0, 0.14, 0.3) ==
          doctest::Approx(0.0083967).epsilon(1e-4));
    // far source gives a vanishing difference
    CHECK(true_path_difference_distance(1e6, 0.14, 0.3) ==
          doctest::Approx(4.2e-8).epsilon(0.01));

    CHECK_THROWS_AS(true_path_difference_distance(0.0, 0.1, 0.3), validation_error);
    CHECK_THROWS_AS(true_path_difference_distance(-2.0, 0.1, 0.3), validation_error);
}

TEST_CASE("distance path difference is odd in the offset and monotone") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> D(0.5, 20.0);
    std::uniform_real_distribution<double> dd(0.0, 0.5);
    for (int i = 0; i < 2000; ++i) {
        const double d = D(rng), x = dd(rng);
        CHECK(true_path_difference_distance(d, -x, 0.3) ==
              doctest::Approx(-true_path_difference_distance(d, x, 0.3)));
        CHECK(true_path_difference_distance(d, x + 0.01, 0.3) >=
              true_path_difference_distance(d, x, 0.3));
        CHECK(true_path_difference_distance(d + 0.5, x + 0.01, 0.3) <=
              true_path_difference_distance(d, x + 0.01, 0.3));
    }
}

TEST_CASE("exact pose geometry agrees with the closed forms") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> theta(0.0, kPi / 2.0);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> dist(1.0, 20.0);

    for (int i = 0; i < 500; ++i) {
        SourceTruth src;
        src.distance_m = dist(rng);
        src.elevation_rad = theta(rng);
        src.azimuth_rad = angle(rng);
        const double beta = angle(rng);

        // rotation only: matches b*cos(theta)*sin(phi - beta)
        ArrayPose pose{beta, 0.0, 0.18};
        const double expected = true_path_difference_3d(
            src.elevation_rad, psi_of(src.azimuth_rad, beta), 0.18);
        CHECK(path_difference_exact(src, pose) == doctest::Approx(expected).epsilon(1e-9));
    }

    // translation with perfect facing: matches b*dd/sqrt(dd^2 + D^2)
    for (int i = 0; i < 500; ++i) {
        SourceTruth src;
        src.distance_m = dist(rng);
        src.elevation_rad = theta(rng);
        src.azimuth_rad = angle(rng);
        const double dd = 0.001 + 0.2 * (i / 500.0);
        ArrayPose pose{src.azimuth_rad, dd, 0.18};
        const double expected =
            true_path_difference_distance(src.distance_m, dd, 0.18);
        CHECK(path_difference_exact(src, pose) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("source truth validation rejects out-of-domain values") {
    SourceTruth below;
    below.distance_m = 5.0;
    below.elevation_rad = -0.1;
    below.azimuth_rad = 0.0;
    CHECK_THROWS_AS(below.validate(), validation_error);

    SourceTruth zero_dist;
    zero_dist.distance_m = 0.0;
    CHECK_THROWS_AS(zero_dist.validate(), validation_error);
}
