#pragma once

// Closed-form polynomial planners.
//
// Each planner fixes a polynomial per axis from endpoint constraints:
//
//   MinVelocity       degree 1, position at both ends           (2x2 system)
//   MinAcceleration   degree 3, position + velocity             (4x4 system)
//   MinJerk           degree 5, position + velocity + accel.    (6x6 system)
//   MinJerkFullStop   MinJerk with terminal velocity/accel = 0
//   SafeMode          constant position (hover)
//
// Coefficients are in absolute time: p(t) = sum_k c_k t^k for t in [t_i, t_f].
// The system is solved, and the trajectory evaluated, on the segment clock
// t - t_i; far from t = 0 the absolute monomial basis loses too many digits
// for either. The x, y, z axes and yaw share one time matrix and differ only
// in the right-hand side, so each system is factored once.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "uds/error.hpp"
#include "uds/format.hpp"
#include "uds/geometry.hpp"
#include "uds/linalg.hpp"
#include "uds/state.hpp"

namespace uds {

enum class PlannerKind : int {
    MinVelocity = 0,
    MinAcceleration = 1,
    MinJerk = 2,
    MinJerkFullStop = 3,
    SafeMode = 4,
};

inline constexpr std::size_t kNumPlanners = 5;
inline constexpr std::array<PlannerKind, kNumPlanners> kAllPlanners = {
    PlannerKind::MinVelocity, PlannerKind::MinAcceleration, PlannerKind::MinJerk,
    PlannerKind::MinJerkFullStop, PlannerKind::SafeMode};

[[nodiscard]] constexpr std::size_t index_of(PlannerKind k) { return static_cast<std::size_t>(k); }

[[nodiscard]] constexpr std::string_view to_string(PlannerKind k) {
    switch (k) {
        case PlannerKind::MinVelocity: return "min_velocity";
        case PlannerKind::MinAcceleration: return "min_acceleration";
        case PlannerKind::MinJerk: return "min_jerk";
        case PlannerKind::MinJerkFullStop: return "min_jerk_full_stop";
        case PlannerKind::SafeMode: return "safe_mode";
    }
    return "unknown";
}

[[nodiscard]] inline std::optional<PlannerKind> parse_planner(std::string_view name) {
    for (PlannerKind k : kAllPlanners) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

inline std::ostream& operator<<(std::ostream& os, PlannerKind k) { return os << to_string(k); }

struct BoundaryConditions {
    double t_i = 0.0;
    double t_f = 1.0;
    Vec3 p_i, p_f;
    Vec3 v_i, v_f;
    Vec3 a_i, a_f;
    double yaw_i = 0.0, yaw_f = 0.0;
    double yaw_rate_i = 0.0, yaw_rate_f = 0.0;
    double yaw_acc_i = 0.0, yaw_acc_f = 0.0;
};

/// One polynomial axis, coefficients c_0..c_degree in ascending order.
struct Polynomial {
    std::array<double, 6> c{};
    int degree = 0;

    /// Value and first two derivatives by Horner's rule.
    [[nodiscard]] std::array<double, 3> eval(double t) const {
        double p = c[degree];
        double v = 0.0;
        double a = 0.0;
        for (int k = degree - 1; k >= 0; --k) {
            a = a * t + 2.0 * v;
            v = v * t + p;
            p = p * t + c[k];
        }
        return {p, v, a};
    }

    /// q with q(s) = p(s + origin).
    [[nodiscard]] Polynomial shifted(double origin) const {
        Polynomial q;
        q.degree = degree;
        for (int k = 0; k <= degree; ++k) {
            double binom = 1.0;  // C(k, j)
            double power = 1.0;  // origin^(k - j)
            for (int j = k; j >= 0; --j) {
                q.c[j] += c[k] * binom * power;
                binom = binom * j / (k - j + 1);
                power *= origin;
            }
        }
        return q;
    }
};

struct TrajectorySample {
    Vec3 position;
    Vec3 velocity;
    Vec3 acceleration;
    double yaw = 0.0;
    double yaw_rate = 0.0;
    double yaw_acc = 0.0;
    bool clamped = false;
};

class PolynomialTrajectory {
public:
    static constexpr int kYawAxis = 3;

    PolynomialTrajectory() = default;
    PolynomialTrajectory(PlannerKind kind, double t_i, double t_f, const std::array<Polynomial, 4>& axes)
        : kind_(kind), t_i_(t_i), t_f_(t_f), axes_(axes) {
        for (std::size_t i = 0; i < 4; ++i) local_[i] = axes_[i].shifted(t_i);
    }

    /// From coefficients in s = t - t_i.
    [[nodiscard]] static PolynomialTrajectory from_segment_clock(PlannerKind kind, double t_i, double t_f,
                                                                 const std::array<Polynomial, 4>& local) {
        PolynomialTrajectory p;
        p.kind_ = kind;
        p.t_i_ = t_i;
        p.t_f_ = t_f;
        p.local_ = local;
        for (std::size_t i = 0; i < 4; ++i) p.axes_[i] = local[i].shifted(-t_i);
        return p;
    }

    [[nodiscard]] PlannerKind kind() const noexcept { return kind_; }
    [[nodiscard]] double t_i() const noexcept { return t_i_; }
    [[nodiscard]] double t_f() const noexcept { return t_f_; }
    [[nodiscard]] double duration() const noexcept { return t_f_ - t_i_; }
    [[nodiscard]] const Polynomial& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
    [[nodiscard]] int degree() const { return axes_[0].degree; }

    /// Position, velocity and acceleration at t. Times outside [t_i, t_f]
    /// are clamped to the nearest endpoint and flagged.
    [[nodiscard]] TrajectorySample evaluate(double t) const {
        TrajectorySample s;
        if (t < t_i_) {
            t = t_i_;
            s.clamped = true;
        } else if (t > t_f_) {
            t = t_f_;
            s.clamped = true;
        }
        for (int i = 0; i < 3; ++i) {
            const auto [p, v, a] = local_[static_cast<std::size_t>(i)].eval(t - t_i_);
            s.position[i] = p;
            s.velocity[i] = v;
            s.acceleration[i] = a;
        }
        const auto [yp, yv, ya] = local_[kYawAxis].eval(t - t_i_);
        s.yaw = wrap_angle(yp);
        s.yaw_rate = yv;
        s.yaw_acc = ya;
        return s;
    }

private:
    PlannerKind kind_ = PlannerKind::SafeMode;
    double t_i_ = 0.0;
    double t_f_ = 0.0;
    std::array<Polynomial, 4> axes_{};
    std::array<Polynomial, 4> local_{};
};

/// Literal boundary-condition matrix: row (d, t) holds the d-th derivative of
/// [1, t, t^2, ...]. Rows are ordered [derivs at t_i..., derivs at t_f...].
template <std::size_t N>
[[nodiscard]] linalg::Matrix<N> boundary_matrix(double t_i, double t_f) {
    static_assert(N == 2 || N == 4 || N == 6);
    constexpr std::size_t derivs = N / 2;
    linalg::Matrix<N> m{};
    for (std::size_t end = 0; end < 2; ++end) {
        const double t = end == 0 ? t_i : t_f;
        for (std::size_t d = 0; d < derivs; ++d) {
            auto& row = m[end * derivs + d];
            for (std::size_t j = d; j < N; ++j) {
                double falling = 1.0;
                for (std::size_t q = 0; q < d; ++q) falling *= static_cast<double>(j - q);
                row[j] = falling * std::pow(t, static_cast<double>(j - d));
            }
        }
    }
    return m;
}

namespace detail {

inline void validate(const BoundaryConditions& bc) {
    const bool finite = std::isfinite(bc.t_i) && std::isfinite(bc.t_f) && is_finite(bc.p_i) &&
                        is_finite(bc.p_f) && is_finite(bc.v_i) && is_finite(bc.v_f) && is_finite(bc.a_i) &&
                        is_finite(bc.a_f) && std::isfinite(bc.yaw_i) && std::isfinite(bc.yaw_f) &&
                        std::isfinite(bc.yaw_rate_i) && std::isfinite(bc.yaw_rate_f) &&
                        std::isfinite(bc.yaw_acc_i) && std::isfinite(bc.yaw_acc_f);
    if (!finite) throw Error(ErrorCode::InvalidInput, "non-finite boundary condition");
    const double duration = bc.t_f - bc.t_i;
    if (!(duration >= 1e-3 && duration <= 60.0)) {
        throw Error(ErrorCode::InvalidInput,
                    "segment duration " + std::to_string(duration) + " s outside [1e-3, 60]");
    }
}

// Per-axis constraint values in matrix row order.
template <std::size_t N>
linalg::Vector<N> rhs(const BoundaryConditions& bc, int axis) {
    // Yaw endpoint is taken on the shortest arc from yaw_i.
    const double yaw_f = bc.yaw_i + angle_diff(bc.yaw_f, bc.yaw_i);
    const bool yaw = axis == PolynomialTrajectory::kYawAxis;
    auto pick = [&](const Vec3& v, double yaw_value) { return yaw ? yaw_value : v[axis]; };
    if constexpr (N == 2) {
        return {pick(bc.p_i, bc.yaw_i), pick(bc.p_f, yaw_f)};
    } else if constexpr (N == 4) {
        return {pick(bc.p_i, bc.yaw_i), pick(bc.v_i, bc.yaw_rate_i), pick(bc.p_f, yaw_f),
                pick(bc.v_f, bc.yaw_rate_f)};
    } else {
        return {pick(bc.p_i, bc.yaw_i), pick(bc.v_i, bc.yaw_rate_i), pick(bc.a_i, bc.yaw_acc_i),
                pick(bc.p_f, yaw_f),    pick(bc.v_f, bc.yaw_rate_f), pick(bc.a_f, bc.yaw_acc_f)};
    }
}

template <std::size_t N>
PolynomialTrajectory solve(PlannerKind kind, const BoundaryConditions& bc) {
    validate(bc);
    const linalg::LuFactorization<N> lu(boundary_matrix<N>(0.0, bc.t_f - bc.t_i));
    std::array<Polynomial, 4> local{};
    for (int axis = 0; axis < 4; ++axis) {
        const auto c = lu.solve(rhs<N>(bc, axis));
        auto& poly = local[static_cast<std::size_t>(axis)];
        poly.degree = static_cast<int>(N) - 1;
        for (std::size_t j = 0; j < N; ++j) poly.c[j] = c[j];
    }
    return PolynomialTrajectory::from_segment_clock(kind, bc.t_i, bc.t_f, local);
}

}  // namespace detail

/// Straight line through p_i and p_f; velocities and accelerations in `bc`
/// are ignored.
[[nodiscard]] inline PolynomialTrajectory plan_min_velocity(const BoundaryConditions& bc) {
    return detail::solve<2>(PlannerKind::MinVelocity, bc);
}

[[nodiscard]] inline PolynomialTrajectory plan_min_acceleration(const BoundaryConditions& bc) {
    return detail::solve<4>(PlannerKind::MinAcceleration, bc);
}

/// Quintic through position, velocity and acceleration at both ends. With
/// `full_stop` the terminal velocity and acceleration are forced to zero
/// whatever `bc` requests.
[[nodiscard]] inline PolynomialTrajectory plan_min_jerk(const BoundaryConditions& bc, bool full_stop) {
    if (!full_stop) return detail::solve<6>(PlannerKind::MinJerk, bc);
    BoundaryConditions stop = bc;
    stop.v_f = {};
    stop.a_f = {};
    stop.yaw_rate_f = 0.0;
    stop.yaw_acc_f = 0.0;
    return detail::solve<6>(PlannerKind::MinJerkFullStop, stop);
}

/// Hover at the current position and yaw for `hold_duration` seconds,
/// starting at `t_i`.
[[nodiscard]] inline PolynomialTrajectory plan_safe_mode(const DroneState& current, double hold_duration,
                                                         double t_i = 0.0) {
    if (!(hold_duration > 0.0) || !std::isfinite(hold_duration)) {
        throw Error(ErrorCode::InvalidInput, "safe-mode hold duration must be positive");
    }
    std::array<Polynomial, 4> axes{};
    for (int i = 0; i < 3; ++i) axes[static_cast<std::size_t>(i)].c[0] = current.position[i];
    axes[PolynomialTrajectory::kYawAxis].c[0] = current.yaw;
    return {PlannerKind::SafeMode, t_i, t_i + hold_duration, axes};
}

struct PlannerConfig {
    /// Cruise speed per moving planner, indexed by PlannerKind (SafeMode unused).
    std::array<double, 4> cruise_speed{1.0, 2.5, 2.4, 1.8};
    double min_duration = 0.25;
    double safe_hold = 0.4;

    [[nodiscard]] double cruise(PlannerKind k) const {
        if (k == PlannerKind::SafeMode) return 0.0;
        return cruise_speed[index_of(k)];
    }
};

/// Segment duration: distance over the planner's cruise speed, floored at
/// min_duration. Safe mode returns its hold time.
[[nodiscard]] inline double plan_duration(double distance, PlannerKind kind, const PlannerConfig& config) {
    if (!(distance >= 0.0)) throw Error(ErrorCode::InvalidInput, "negative distance");
    if (kind == PlannerKind::SafeMode) return config.safe_hold;
    return std::max(config.min_duration, distance / config.cruise(kind));
}

/// Dispatch to the planner for `kind`. SafeMode hovers at bc.p_i / bc.yaw_i.
[[nodiscard]] inline PolynomialTrajectory plan(PlannerKind kind, const BoundaryConditions& bc) {
    switch (kind) {
        case PlannerKind::MinVelocity: return plan_min_velocity(bc);
        case PlannerKind::MinAcceleration: return plan_min_acceleration(bc);
        case PlannerKind::MinJerk: return plan_min_jerk(bc, false);
        case PlannerKind::MinJerkFullStop: return plan_min_jerk(bc, true);
        case PlannerKind::SafeMode: {
            DroneState hover;
            hover.position = bc.p_i;
            hover.yaw = bc.yaw_i;
            return plan_safe_mode(hover, bc.t_f - bc.t_i, bc.t_i);
        }
    }
    throw Error(ErrorCode::InvalidInput, "unknown planner");
}

/// Sampled trajectory as CSV: t,x,y,z,vx,vy,vz,ax,ay,az,yaw. `samples` >= 2
/// rows spanning [t_i, t_f] inclusive.
inline void write_trajectory_csv(std::ostream& os, const PolynomialTrajectory& traj, int samples) {
    if (samples < 2) throw Error(ErrorCode::InvalidInput, "need at least 2 samples");
    os << "t,x,y,z,vx,vy,vz,ax,ay,az,yaw\n";
    for (int k = 0; k < samples; ++k) {
        const double t = k + 1 == samples ? traj.t_f()
                                          : traj.t_i() + traj.duration() * static_cast<double>(k) /
                                                             static_cast<double>(samples - 1);
        const TrajectorySample s = traj.evaluate(t);
        os << format_double(t);
        for (const Vec3* v : {&s.position, &s.velocity, &s.acceleration}) {
            os << ',' << format_double(v->x) << ',' << format_double(v->y) << ',' << format_double(v->z);
        }
        os << ',' << format_double(s.yaw) << '\n';
    }
}

}  // namespace uds
