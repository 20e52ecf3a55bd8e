#pragma once

// Frame conventions.
//
//   I  inertial frame, z up.
//   B  drone body frame; only yaw is modeled, so B is I rotated about z.
//   G  gate frame; its x axis is the gate normal (flight direction).
//
// The relative gate pose is expressed in B as spherical coordinates
// (r, psi, theta) plus the yaw difference phi between G and B:
//
//   x = r sin(theta) cos(psi)
//   y = r sin(theta) sin(psi)
//   z = r cos(theta)
//
// psi is the azimuth from body x toward body y, theta the inclination from
// body z. A gate straight ahead at equal height is (r, 0, pi/2, phi).

#include <cmath>
#include <numbers>

namespace uds {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(double s) {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

    [[nodiscard]] constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    [[nodiscard]] constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

[[nodiscard]] constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
[[nodiscard]] inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
[[nodiscard]] inline bool is_finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Wrap an angle to (-pi, pi]. -pi maps to +pi.
[[nodiscard]] inline double wrap_angle(double a) {
    double w = std::remainder(a, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

/// Signed shortest-arc difference a - b, in (-pi, pi].
[[nodiscard]] inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

struct Pose {
    Vec3 position;
    double yaw = 0.0;
};

struct GatePoseSpherical {
    double r = 0.0;
    double psi = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

/// Rotate a vector about +z by `yaw` (body -> inertial for a body with that yaw).
[[nodiscard]] inline Vec3 rotate_z(const Vec3& v, double yaw) {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

[[nodiscard]] inline Vec3 spherical_to_cartesian(const GatePoseSpherical& p) {
    const double st = std::sin(p.theta);
    return {p.r * st * std::cos(p.psi), p.r * st * std::sin(p.psi), p.r * std::cos(p.theta)};
}

/// Inverse of spherical_to_cartesian. The origin maps to r = psi = theta = 0.
[[nodiscard]] inline GatePoseSpherical cartesian_to_spherical(const Vec3& v, double phi = 0.0) {
    const double r = norm(v);
    if (r < 1e-9) return {0.0, 0.0, 0.0, wrap_angle(phi)};
    const double horizontal = std::hypot(v.x, v.y);
    return {r, wrap_angle(std::atan2(v.y, v.x)), std::atan2(horizontal, v.z), wrap_angle(phi)};
}

/// Gate pose as seen from the drone body frame.
[[nodiscard]] inline GatePoseSpherical relative_gate_pose(const Pose& drone, const Pose& gate) {
    const Vec3 body = rotate_z(gate.position - drone.position, -drone.yaw);
    return cartesian_to_spherical(body, angle_diff(gate.yaw, drone.yaw));
}

/// Inertial gate pose from a body-frame relative pose: rotate to I, add the
/// drone position.
[[nodiscard]] inline Pose compose_gate_pose(const Pose& drone, const GatePoseSpherical& relative) {
    return {drone.position + rotate_z(spherical_to_cartesian(relative), drone.yaw),
            wrap_angle(drone.yaw + relative.phi)};
}

}  // namespace uds
