#pragma once

#include "uds/geometry.hpp"

namespace uds {

/// Kinematic drone state in the inertial frame. `angular_velocity` holds
/// (roll rate, pitch rate, yaw rate); only the yaw rate is driven by the
/// tracking model.
struct DroneState {
    Vec3 position;
    double yaw = 0.0;
    Vec3 velocity;
    Vec3 angular_velocity;
    Vec3 acceleration;

    [[nodiscard]] Pose pose() const { return {position, yaw}; }
};

[[nodiscard]] inline bool is_finite(const DroneState& s) {
    return is_finite(s.position) && std::isfinite(s.yaw) && is_finite(s.velocity) &&
           is_finite(s.angular_velocity) && is_finite(s.acceleration);
}

}  // namespace uds
