#pragma once

// Kinematic race simulator.
//
// The drone tracks the active polynomial reference with a saturated
// first-order velocity loop:
//
//   v_cmd = v_ref + k_p (p_ref - p),   |v_cmd| <= v_max,   |dv| <= a_max dt
//
// integrated by semi-implicit Euler. Each frame the drone observes the gate
// it is heading for (and the one after it) through the noisy observer; the
// active policy picks a planner and the drone replans toward the observed
// gate on a fixed cadence, on gate passage, or when the selection changes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "uds/classifier.hpp"
#include "uds/error.hpp"
#include "uds/geometry.hpp"
#include "uds/perception.hpp"
#include "uds/planners.hpp"
#include "uds/state.hpp"
#include "uds/switcher.hpp"

namespace uds {

struct TrackingConfig {
    double k_p = 2.0;
    double k_yaw = 2.0;
    double v_max = 4.0;
    double a_max = 8.0;
    double yaw_rate_max = 3.0;
};

struct SimConfig {
    double dt = 0.02;
    double replan_period = 0.4;
    double gate_timeout = 12.0;
    /// Full-stop plans aim this far past the gate plane so the stop point is
    /// beyond the gate.
    double full_stop_overshoot = 0.6;
    TrackingConfig tracking;
    PlannerConfig planner;
    NoiseModel noise;
    double estimator_floor = 1e-6;
    /// Image corruption grows with flight speed: the scheduled disturbance is
    /// scaled by (1 + motion_blur * |v|).
    double motion_blur = 0.5;
    CostConfig cost;

    [[nodiscard]] DisturbanceLevel effective_disturbance(const DisturbanceLevel& d, const Vec3& velocity) const {
        const double k = 1.0 + motion_blur * norm(velocity);
        return {d.brightness * k, d.contrast * k, d.saturation * k};
    }
};

struct Track {
    std::vector<Pose> gates;
    double gate_side = 1.6;
    /// Inner-square margin: a crossing within this distance of the frame is a strike.
    double margin = 0.2;
    /// Strike distance to the frame for steps that do not cross the plane,
    /// and the width of the strike band outside the frame.
    double clearance = 0.2;
    Vec3 bounds_min{-50.0, -50.0, 0.0};
    Vec3 bounds_max{50.0, 50.0, 10.0};
    Pose start;

    void validate() const {
        if (gates.empty()) throw Error(ErrorCode::Config, "track has no gates");
        if (!(gate_side > 0.0) || margin < 0.0 || clearance < 0.0 || 2.0 * margin >= gate_side) {
            throw Error(ErrorCode::Config, "invalid gate geometry");
        }
        for (std::size_t i = 0; i + 1 < gates.size(); ++i) {
            if (norm(gates[i + 1].position - gates[i].position) <= gate_side) {
                throw Error(ErrorCode::Config, "gates " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                                   " closer than the gate side");
            }
        }
        if (!(bounds_min.x < bounds_max.x && bounds_min.y < bounds_max.y && bounds_min.z < bounds_max.z)) {
            throw Error(ErrorCode::Config, "empty bounding box");
        }
    }
};

[[nodiscard]] inline bool inside(const Vec3& p, const Vec3& lo, const Vec3& hi) {
    return p.x >= lo.x && p.y >= lo.y && p.z >= lo.z && p.x <= hi.x && p.y <= hi.y && p.z <= hi.z;
}

/// Reference at time t. Past t_f the reference coasts at the terminal
/// velocity, so carry-through plans keep moving and stop plans hold.
[[nodiscard]] inline TrajectorySample reference_at(const PolynomialTrajectory& traj, double t) {
    TrajectorySample s = traj.evaluate(t);
    if (t > traj.t_f()) {
        s.position += s.velocity * (t - traj.t_f());
        s.yaw = wrap_angle(s.yaw + s.yaw_rate * (t - traj.t_f()));
        s.acceleration = {};
        s.yaw_acc = 0.0;
    }
    return s;
}

namespace detail {
inline Vec3 clamp_norm(const Vec3& v, double limit) {
    const double n = norm(v);
    return n > limit ? v * (limit / n) : v;
}
}  // namespace detail

/// Advance the tracking model from local trajectory time t to t + dt,
/// tracking the reference at t + dt.
[[nodiscard]] inline DroneState step(const DroneState& s, const PolynomialTrajectory& traj, double t, double dt,
                                     const TrackingConfig& cfg = {}) {
    if (!(dt > 0.0 && dt <= 0.1)) throw Error(ErrorCode::InvalidInput, "step dt outside (0, 0.1]");
    if (!is_finite(s)) throw Error(ErrorCode::SimulationFault, "non-finite drone state");
    const TrajectorySample ref = reference_at(traj, t + dt);

    const Vec3 v_cmd = detail::clamp_norm(ref.velocity + (ref.position - s.position) * cfg.k_p, cfg.v_max);
    const Vec3 dv = detail::clamp_norm(v_cmd - s.velocity, cfg.a_max * dt);

    DroneState n = s;
    n.velocity = detail::clamp_norm(s.velocity + dv, cfg.v_max);
    n.position = s.position + n.velocity * dt;
    n.acceleration = dv * (1.0 / dt);

    const double rate = std::clamp(ref.yaw_rate + cfg.k_yaw * angle_diff(ref.yaw, s.yaw), -cfg.yaw_rate_max,
                                   cfg.yaw_rate_max);
    n.yaw = wrap_angle(s.yaw + rate * dt);
    n.angular_velocity = {0.0, 0.0, rate};
    if (!is_finite(n)) throw Error(ErrorCode::SimulationFault, "non-finite drone state after step");
    return n;
}

enum class GateResult { Neither, Passed, Struck };

struct GateCrossing {
    GateResult result = GateResult::Neither;
    bool forward = false;  // crossed along the gate normal
};

struct GateGeometry {
    double side = 1.6;
    double margin = 0.2;
    double clearance = 0.2;
};

/// Classify the straight segment prev -> next against a square gate.
[[nodiscard]] inline GateCrossing check_gate_pass(const Vec3& prev, const Vec3& next, const Pose& gate,
                                                  const GateGeometry& g) {
    const Vec3 n{std::cos(gate.yaw), std::sin(gate.yaw), 0.0};
    const Vec3 u{-std::sin(gate.yaw), std::cos(gate.yaw), 0.0};
    const double half = 0.5 * g.side;
    const double s0 = dot(prev - gate.position, n);
    const double s1 = dot(next - gate.position, n);

    if ((s0 < 0.0 && s1 >= 0.0) || (s0 > 0.0 && s1 <= 0.0)) {
        const double f = s0 / (s0 - s1);
        const Vec3 q = prev + (next - prev) * f - gate.position;
        const double lateral = std::max(std::abs(dot(q, u)), std::abs(q.z));
        GateCrossing c;
        c.forward = s1 > s0;
        if (lateral < half - g.margin) {
            c.result = GateResult::Passed;
        } else if (lateral <= half + g.clearance) {
            c.result = GateResult::Struck;
        }
        return c;
    }

    // No plane crossing: strike only when the end point touches the frame.
    const Vec3 q = next - gate.position;
    const double a = std::abs(dot(q, u));
    const double b = std::abs(q.z);
    const double in_plane =
        (a <= half && b <= half) ? half - std::max(a, b) : std::hypot(std::max(a - half, 0.0), std::max(b - half, 0.0));
    if (std::hypot(s1, in_plane) < g.clearance) return {GateResult::Struck, false};
    return {};
}

struct FixedPolicy {
    PlannerKind planner;
};
struct UdsPolicy {
    const ClassifierModel* model;
};
using Policy = std::variant<FixedPolicy, UdsPolicy>;

[[nodiscard]] inline std::string policy_name(const Policy& p) {
    if (const auto* f = std::get_if<FixedPolicy>(&p)) return std::string(to_string(f->planner));
    return "uds";
}

enum class CrashCause { None, GateStrike, OutOfBounds, Timeout };

[[nodiscard]] constexpr std::string_view to_string(CrashCause c) {
    switch (c) {
        case CrashCause::None: return "none";
        case CrashCause::GateStrike: return "gate_strike";
        case CrashCause::OutOfBounds: return "out_of_bounds";
        case CrashCause::Timeout: return "timeout";
    }
    return "unknown";
}

struct SegmentLog {
    double t_start = 0.0;
    std::size_t gate = 0;
    PlannerKind planner = PlannerKind::SafeMode;
    GatePoseSpherical observed;
    std::optional<CovarianceEstimate> covariance;
};

struct StepLog {
    double t = 0.0;
    DroneState state;
    PlannerKind planner = PlannerKind::SafeMode;
    GatePoseSpherical observed;
    std::optional<CovarianceEstimate> covariance;
    DisturbanceLevel disturbance;
};

struct EpisodeResult {
    bool success = false;
    std::optional<double> lap_time;
    CrashCause crash_cause = CrashCause::None;
    std::array<std::size_t, kNumPlanners> planner_usage{};
    /// Planning decisions made while the disturbance magnitude was above
    /// `noisy_threshold` (see EpisodeOptions).
    std::array<std::size_t, kNumPlanners> planner_usage_noisy{};
    std::vector<SegmentLog> segments;
    std::size_t gates_passed = 0;
    double sim_time = 0.0;
    DroneState final_state;
};

/// Mid-flight starting point: state, clock and already-filled observation
/// windows for the first gate and the one after it.
struct EpisodeStart {
    DroneState state;
    double t0 = 0.0;
    ObservationWindow current;
    ObservationWindow next;
};

struct EpisodeOptions {
    double noisy_threshold = 1.0;
    /// End successfully after this many gates (0 = the whole track).
    std::size_t stop_after_gates = 0;
    const EpisodeStart* start = nullptr;
    std::vector<StepLog>* step_log = nullptr;
};

namespace detail {

struct GateEstimate {
    Pose gate;
    std::optional<Pose> next;
};

// Inertial gate pose averaged over the frames in the window; each frame is
// composed with the drone pose it was taken from.
inline Pose average_gate(const ObservationWindow& w) {
    Vec3 p{};
    double c = 0.0, s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Pose g = compose_gate_pose(w[i].observer, w[i].observed);
        p += g.position;
        c += std::cos(g.yaw);
        s += std::sin(g.yaw);
    }
    return {p * (1.0 / static_cast<double>(w.size())), std::atan2(s, c)};
}

inline GateEstimate estimate_gates(const ObservationWindow& cur, const ObservationWindow& next) {
    GateEstimate e{average_gate(cur), std::nullopt};
    if (next.size() > 0) e.next = average_gate(next);
    return e;
}

}  // namespace detail

/// Boundary conditions for `kind` from the current state toward an observed
/// gate. Time starts at zero; the duration is `duration` when given (floored
/// at the planner minimum), otherwise plan_duration.
[[nodiscard]] inline BoundaryConditions approach_conditions(PlannerKind kind, const DroneState& s, const Pose& gate,
                                                            const std::optional<Pose>& next_gate,
                                                            const SimConfig& cfg,
                                                            std::optional<double> duration = std::nullopt) {
    const Vec3 normal{std::cos(gate.yaw), std::sin(gate.yaw), 0.0};
    BoundaryConditions bc;
    bc.t_i = 0.0;
    bc.p_i = s.position;
    bc.v_i = s.velocity;
    bc.a_i = s.acceleration;
    bc.yaw_i = s.yaw;
    bc.yaw_rate_i = s.angular_velocity.z;
    bc.yaw_f = gate.yaw;
    bc.p_f = gate.position;

    const double cruise = cfg.planner.cruise(kind);
    switch (kind) {
        case PlannerKind::MinVelocity:
            break;
        case PlannerKind::MinAcceleration:
            bc.v_f = normal * cruise;
            break;
        case PlannerKind::MinJerk: {
            Vec3 dir = normal;
            if (next_gate) {
                const Vec3 d = next_gate->position - gate.position;
                if (norm(d) > 1e-6) dir = d * (1.0 / norm(d));
            }
            bc.v_f = dir * cruise;
            break;
        }
        case PlannerKind::MinJerkFullStop:
            bc.p_f = gate.position + normal * cfg.full_stop_overshoot;
            break;
        case PlannerKind::SafeMode:
            bc.p_f = s.position;
            bc.yaw_f = s.yaw;
            bc.t_f = cfg.planner.safe_hold;
            return bc;
    }
    bc.t_f = duration ? std::max(*duration, cfg.planner.min_duration)
                      : plan_duration(norm(bc.p_f - bc.p_i), kind, cfg.planner);
    return bc;
}

[[nodiscard]] inline PolynomialTrajectory plan_approach(PlannerKind kind, const DroneState& s, const Pose& gate,
                                                        const std::optional<Pose>& next_gate, const SimConfig& cfg,
                                                        std::optional<double> duration = std::nullopt) {
    if (kind == PlannerKind::SafeMode) return plan_safe_mode(s, cfg.planner.safe_hold);
    return plan(kind, approach_conditions(kind, s, gate, next_gate, cfg, duration));
}

/// Outcome of flying one policy through a sequence of gates.
[[nodiscard]] inline EpisodeResult run_episode(const Track& track, const Policy& policy,
                                               const DisturbanceSchedule& schedule, std::uint64_t seed,
                                               const SimConfig& cfg = {}, const EpisodeOptions& options = {}) {
    track.validate();
    if (const auto* u = std::get_if<UdsPolicy>(&policy); u && u->model == nullptr) {
        throw Error(ErrorCode::Config, "UDS policy requires a trained model");
    }
    if (!(cfg.dt > 0.0 && cfg.dt <= 0.1) || !(cfg.replan_period > 0.0)) {
        throw Error(ErrorCode::Config, "invalid simulation timing");
    }

    std::mt19937_64 rng(seed);
    const WindowVarianceEstimator estimator(cfg.estimator_floor);
    const GateGeometry geometry{track.gate_side, track.margin, track.clearance};

    DroneState state;
    ObservationWindow current_window, next_window;
    double t = 0.0;
    if (options.start != nullptr) {
        state = options.start->state;
        current_window = options.start->current;
        next_window = options.start->next;
        t = options.start->t0;
    } else {
        state.position = track.start.position;
        state.yaw = track.start.yaw;
    }
    const std::size_t goal =
        options.stop_after_gates == 0 ? track.gates.size() : std::min(options.stop_after_gates, track.gates.size());

    EpisodeResult result;
    std::size_t gate = 0;
    const double t_begin = t;
    double gate_start = t;
    long frame = 0;

    std::optional<PolynomialTrajectory> active;
    double segment_start = 0.0;
    double next_replan = 0.0;
    bool force_replan = true;
    // Periodic replans toward the same gate with the same planner keep the
    // original arrival time instead of restarting the clock.
    double arrival = 0.0;

    const auto max_steps = static_cast<long>(std::ceil(track.gates.size() * cfg.gate_timeout / cfg.dt)) + 10;
    result.final_state = state;
    for (long k = 0; k < max_steps; ++k) {
        const DisturbanceLevel scheduled = schedule.level_at(t);
        const DisturbanceLevel disturbance = cfg.effective_disturbance(scheduled, state.velocity);
        const auto& target = track.gates[gate];
        current_window.push(observe_from(state.pose(), target, disturbance, rng, cfg.noise, frame));
        if (gate + 1 < track.gates.size()) {
            next_window.push(observe_from(state.pose(), track.gates[gate + 1], disturbance, rng, cfg.noise, frame));
        }
        ++frame;

        std::optional<CovarianceEstimate> cov;
        if (current_window.full()) cov = estimator.estimate(current_window);
        const auto est = detail::estimate_gates(current_window, next_window);

        PlannerKind choice = PlannerKind::SafeMode;
        if (cov) {
            if (const auto* f = std::get_if<FixedPolicy>(&policy)) {
                choice = f->planner;
            } else {
                choice = select_planner(*std::get<UdsPolicy>(policy).model, extract_features(state, est.gate, *cov))
                             .planner;
            }
        }

        if (force_replan || !active || t >= next_replan - 1e-9 || choice != active->kind()) {
            const bool keep_arrival = !force_replan && active && choice == active->kind();
            active = plan_approach(choice, state, est.gate, est.next, cfg,
                                   keep_arrival ? std::optional<double>(arrival - t) : std::nullopt);
            arrival = t + active->t_f();
            segment_start = t;
            next_replan = t + cfg.replan_period;
            force_replan = false;
            ++result.planner_usage[index_of(choice)];
            if (scheduled.magnitude() > options.noisy_threshold) ++result.planner_usage_noisy[index_of(choice)];
            result.segments.push_back({t, gate, choice, current_window.latest().observed, cov});
        }

        const DroneState prev = state;
        state = step(state, *active, t - segment_start, cfg.dt, cfg.tracking);
        t += cfg.dt;

        result.final_state = state;
        if (options.step_log != nullptr) {
            options.step_log->push_back(
                {t, state, active->kind(), current_window.latest().observed, cov, scheduled});
        }

        for (std::size_t g = 0; g < track.gates.size(); ++g) {
            const GateCrossing c = check_gate_pass(prev.position, state.position, track.gates[g], geometry);
            if (c.result == GateResult::Struck) {
                result.crash_cause = CrashCause::GateStrike;
                result.sim_time = t;
                return result;
            }
            if (g == gate && c.result == GateResult::Passed && c.forward) {
                ++gate;
                ++result.gates_passed;
                gate_start = t;
                force_replan = true;
                if (gate == goal) {
                    result.success = true;
                    result.lap_time = t - t_begin;
                    result.sim_time = t;
                    return result;
                }
                current_window = next_window;
                next_window.clear();
                break;
            }
        }

        if (!inside(state.position, track.bounds_min, track.bounds_max)) {
            result.crash_cause = CrashCause::OutOfBounds;
            result.sim_time = t;
            return result;
        }
        if (t - gate_start > cfg.gate_timeout) break;
    }
    result.crash_cause = CrashCause::Timeout;
    result.sim_time = t;
    return result;
}

}  // namespace uds
