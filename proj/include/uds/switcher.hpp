#pragma once

// Planner switching: feature extraction, the arrival cost used to label
// training data, and runtime selection from a trained classifier.

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string_view>

#include "uds/classifier.hpp"
#include "uds/geometry.hpp"
#include "uds/perception.hpp"
#include "uds/planners.hpp"
#include "uds/state.hpp"

namespace uds {

inline constexpr std::size_t kNumFeatures = 17;

/// Feature order (normative; also the dataset column order):
///  0-2   gate position minus drone position, body x, y, z       [m]
///  3-5   rotation difference phi, theta, psi                     [rad]
///  6-8   drone linear velocity, body vx, vy, vz                  [m/s]
///  9-11  drone angular rates roll, pitch, yaw                    [rad/s]
///  12-15 sigma2_r, sigma2_phi, sigma2_theta, sigma2_psi
///  16    sigma2_sum
using FeatureVector = std::array<double, kNumFeatures>;

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "dx",        "dy",          "dz",           "dphi",        "dtheta",     "dpsi",
    "vx",        "vy",          "vz",           "wx",          "wy",         "wz",
    "sigma2_r",  "sigma2_phi",  "sigma2_theta", "sigma2_psi",  "sigma2_sum"};

[[nodiscard]] inline FeatureVector extract_features(const DroneState& state, const Pose& nearest_gate,
                                                     const CovarianceEstimate& cov) {
    const GatePoseSpherical rel = relative_gate_pose(state.pose(), nearest_gate);
    // Yaw-only body frame, so the features do not depend on track heading.
    const Vec3 d = rotate_z(nearest_gate.position - state.position, -state.yaw);
    const Vec3 v = rotate_z(state.velocity, -state.yaw);
    return {d.x,
            d.y,
            d.z,
            rel.phi,
            rel.theta,
            rel.psi,
            v.x,
            v.y,
            v.z,
            state.angular_velocity.x,
            state.angular_velocity.y,
            state.angular_velocity.z,
            cov.sigma2_r,
            cov.sigma2_phi,
            cov.sigma2_theta,
            cov.sigma2_psi,
            covariance_sum(cov)};
}

inline constexpr double kCrashCost = std::numeric_limits<double>::infinity();

struct CostConfig {
    /// Offset subtracted from the absolute yaw error before squaring.
    double yaw_offset = kPi / 2.0;
};

/// Arrival cost: distance to the desired pose (position plus offset yaw
/// error) multiplied by the arrival time.
[[nodiscard]] inline double planner_cost(const DroneState& final_state, const Pose& desired, double t_arrival,
                                         const CostConfig& config = {}) {
    if (!(t_arrival > 0.0)) throw Error(ErrorCode::InvalidInput, "arrival time must be positive");
    const Vec3 e = desired.position - final_state.position;
    const double yaw_term = std::abs(angle_diff(desired.yaw, final_state.yaw)) - config.yaw_offset;
    return std::sqrt(dot(e, e) + yaw_term * yaw_term) * t_arrival;
}

struct Selection {
    PlannerKind planner = PlannerKind::SafeMode;
    bool fallback = false;  // non-finite features forced safe mode
};

/// Highest-probability planner; ties resolve to the earlier PlannerKind.
[[nodiscard]] inline PlannerKind select_from_probabilities(std::span<const double> probs) {
    return static_cast<PlannerKind>(argmax(probs));
}

[[nodiscard]] inline Selection select_planner(const ClassifierModel& model, const FeatureVector& features) {
    for (double f : features) {
        if (!std::isfinite(f)) return {PlannerKind::SafeMode, true};
    }
    const auto probs = model.predict_proba(features);
    return {select_from_probabilities(probs), false};
}

}  // namespace uds
