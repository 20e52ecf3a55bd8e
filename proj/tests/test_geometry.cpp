#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "uds/geometry.hpp"

using namespace uds;
using Catch::Matchers::WithinAbs;

namespace {

void check_vec(const Vec3& a, const Vec3& b, double tol) {
    CHECK_THAT(a.x, WithinAbs(b.x, tol));
    CHECK_THAT(a.y, WithinAbs(b.y, tol));
    CHECK_THAT(a.z, WithinAbs(b.z, tol));
}

}  // namespace

TEST_CASE("spherical poles and equator", "[geometry]") {
    check_vec(spherical_to_cartesian({1.0, 0.0, 0.0, 0.0}), {0, 0, 1}, 1e-15);
    check_vec(spherical_to_cartesian({2.0, 0.0, kPi / 2, 0.0}), {2, 0, 0}, 1e-15);
    check_vec(spherical_to_cartesian({3.0, kPi / 2, kPi / 2, 0.0}), {0, 3, 0}, 1e-15);
}

TEST_CASE("cartesian to spherical special points", "[geometry]") {
    const auto pole = cartesian_to_spherical({0, 0, 5});
    CHECK(pole.r == 5.0);
    CHECK(pole.theta == 0.0);
    CHECK(pole.psi == 0.0);

    const auto origin = cartesian_to_spherical({0, 0, 0});
    CHECK(origin.r == 0.0);
    CHECK(origin.theta == 0.0);
    CHECK(origin.psi == 0.0);

    const auto flat = cartesian_to_spherical({3, 4, 0});
    CHECK_THAT(flat.r, WithinAbs(5.0, 1e-15));
    CHECK_THAT(flat.theta, WithinAbs(kPi / 2, 1e-15));
    CHECK_THAT(flat.psi, WithinAbs(std::atan2(4.0, 3.0), 1e-15));
    check_vec(spherical_to_cartesian(flat), {3, 4, 0}, 1e-14);
}

TEST_CASE("spherical conversion preserves norm", "[geometry]") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> r(1e-3, 100.0), psi(-kPi, kPi), theta(0.0, kPi);
    for (int i = 0; i < 2000; ++i) {
        const GatePoseSpherical p{r(rng), psi(rng), theta(rng), 0.0};
        CHECK_THAT(norm(spherical_to_cartesian(p)) / p.r, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("angles wrap into (-pi, pi]", "[geometry]") {
    CHECK(wrap_angle(kPi) == kPi);
    CHECK(wrap_angle(-kPi) == kPi);
    CHECK_THAT(wrap_angle(3 * kPi / 2), WithinAbs(-kPi / 2, 1e-15));
    CHECK_THAT(wrap_angle(7.0), WithinAbs(7.0 - kTwoPi, 1e-15));
    CHECK_THAT(angle_diff(kPi - 0.1, -kPi + 0.1), WithinAbs(-0.2, 1e-12));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double w = wrap_angle(u(rng));
        CHECK(w > -kPi);
        CHECK(w <= kPi);
    }
}

TEST_CASE("relative gate pose examples", "[geometry]") {
    const auto aligned = relative_gate_pose({{0, 0, 0}, 0.0}, {{5, 0, 0}, 0.0});
    CHECK_THAT(aligned.r, WithinAbs(5.0, 1e-15));
    CHECK_THAT(aligned.phi, WithinAbs(0.0, 1e-15));
    CHECK_THAT(aligned.psi, WithinAbs(0.0, 1e-15));
    CHECK_THAT(aligned.theta, WithinAbs(kPi / 2, 1e-15));

    const auto same = relative_gate_pose({{1, 2, 3}, 0.4}, {{1, 2, 3}, 0.4});
    CHECK(same.r == 0.0);

    // Drone facing +y sees a gate at +y straight ahead.
    const auto turned = relative_gate_pose({{0, 0, 0}, kPi / 2}, {{0, 4, 0}, kPi / 2});
    CHECK_THAT(turned.psi, WithinAbs(0.0, 1e-12));
    CHECK_THAT(turned.phi, WithinAbs(0.0, 1e-12));
}

TEST_CASE("relative pose composes back to the gate", "[geometry]") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pos(-20.0, 20.0), yaw(-kPi, kPi);
    for (int i = 0; i < 2000; ++i) {
        const Pose drone{{pos(rng), pos(rng), pos(rng)}, yaw(rng)};
        const Pose gate{{pos(rng), pos(rng), pos(rng)}, yaw(rng)};
        const Pose back = compose_gate_pose(drone, relative_gate_pose(drone, gate));
        check_vec(back.position, gate.position, 1e-9);
        CHECK_THAT(angle_diff(back.yaw, gate.yaw), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("rotate_z is a rotation", "[geometry]") {
    const Vec3 v{1.0, 2.0, 3.0};
    check_vec(rotate_z(v, kPi / 2), {-2.0, 1.0, 3.0}, 1e-15);
    check_vec(rotate_z(rotate_z(v, 0.7), -0.7), v, 1e-15);
}
