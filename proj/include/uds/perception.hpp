#pragma once

// Synthetic gate-pose perception: a noisy observer whose per-component noise
// grows with an abstract image-disturbance level, and a sliding-window
// covariance estimator over the last 12 observations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "uds/error.hpp"
#include "uds/format.hpp"
#include "uds/geometry.hpp"

namespace uds {

struct DisturbanceLevel {
    double brightness = 0.0;
    double contrast = 0.0;
    double saturation = 0.0;

    /// Scalar corruption magnitude. Saturation is weighted 10x because its
    /// natural scale is two orders of magnitude smaller.
    [[nodiscard]] double magnitude() const { return brightness + contrast + 10.0 * saturation; }

    [[nodiscard]] bool valid() const {
        return std::isfinite(brightness) && std::isfinite(contrast) && std::isfinite(saturation) &&
               brightness >= 0.0 && contrast >= 0.0 && saturation >= 0.0;
    }
};

/// Component order used by the noise model: r, psi, theta, phi.
struct NoiseModel {
    std::array<double, 4> base{0.03, 0.01, 0.01, 0.01};
    std::array<double, 4> gain{0.10, 0.05, 0.05, 0.05};
    double range_scale = 0.1;

    /// Standard deviation per component at disturbance `d` and true range r.
    [[nodiscard]] std::array<double, 4> stddev(const DisturbanceLevel& d, double r) const {
        const double g = d.magnitude();
        std::array<double, 4> s{};
        for (std::size_t i = 0; i < 4; ++i) s[i] = base[i] + gain[i] * g;
        s[0] *= 1.0 + range_scale * r;
        return s;
    }
};

struct NoisyObservation {
    GatePoseSpherical observed;
    long frame_index = 0;
    GatePoseSpherical true_pose;  // labeling only
    Pose observer;                // drone pose when the frame was taken
};

[[nodiscard]] inline NoisyObservation observe(const GatePoseSpherical& true_pose, const DisturbanceLevel& d,
                                              std::mt19937_64& rng, const NoiseModel& noise = {},
                                              long frame_index = 0) {
    const auto s = noise.stddev(d, true_pose.r);
    std::normal_distribution<double> n01(0.0, 1.0);
    // Draw order is fixed (r, psi, theta, phi) for reproducibility.
    const double er = n01(rng) * s[0];
    const double epsi = n01(rng) * s[1];
    const double etheta = n01(rng) * s[2];
    const double ephi = n01(rng) * s[3];
    NoisyObservation o;
    o.frame_index = frame_index;
    o.true_pose = true_pose;
    o.observed.r = std::max(0.0, true_pose.r + er);
    o.observed.psi = wrap_angle(true_pose.psi + epsi);
    o.observed.theta = std::clamp(true_pose.theta + etheta, 0.0, kPi);
    o.observed.phi = wrap_angle(true_pose.phi + ephi);
    return o;
}

/// Observe an inertial gate from an inertial drone pose.
[[nodiscard]] inline NoisyObservation observe_from(const Pose& drone, const Pose& gate, const DisturbanceLevel& d,
                                                   std::mt19937_64& rng, const NoiseModel& noise = {},
                                                   long frame_index = 0) {
    NoisyObservation o = observe(relative_gate_pose(drone, gate), d, rng, noise, frame_index);
    o.observer = drone;
    return o;
}

struct CovarianceEstimate {
    double sigma2_r = 0.0;
    double sigma2_phi = 0.0;
    double sigma2_theta = 0.0;
    double sigma2_psi = 0.0;

    [[nodiscard]] bool valid() const {
        for (double v : {sigma2_r, sigma2_phi, sigma2_theta, sigma2_psi}) {
            if (!std::isfinite(v) || v < 0.0) return false;
        }
        return true;
    }
};

[[nodiscard]] inline double covariance_sum(const CovarianceEstimate& c) {
    return c.sigma2_r + c.sigma2_phi + c.sigma2_theta + c.sigma2_psi;
}

/// Squared prediction error per component; angle errors on the shortest arc.
[[nodiscard]] inline CovarianceEstimate covariance_label(const GatePoseSpherical& true_pose,
                                                         const GatePoseSpherical& observed) {
    const double er = true_pose.r - observed.r;
    const double ephi = angle_diff(true_pose.phi, observed.phi);
    const double etheta = true_pose.theta - observed.theta;
    const double epsi = angle_diff(true_pose.psi, observed.psi);
    return {er * er, ephi * ephi, etheta * etheta, epsi * epsi};
}

/// Fixed-capacity ring buffer of the most recent observations.
class ObservationWindow {
public:
    static constexpr std::size_t kCapacity = 12;

    void push(const NoisyObservation& o) {
        buf_[head_] = o;
        head_ = (head_ + 1) % kCapacity;
        size_ = std::min(size_ + 1, kCapacity);
    }

    void clear() {
        head_ = 0;
        size_ = 0;
    }

    [[nodiscard]] bool full() const noexcept { return size_ == kCapacity; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }

    /// i-th observation, oldest first.
    [[nodiscard]] const NoisyObservation& operator[](std::size_t i) const {
        const std::size_t start = (head_ + kCapacity - size_) % kCapacity;
        return buf_[(start + i) % kCapacity];
    }

    [[nodiscard]] const NoisyObservation& latest() const { return (*this)[size_ - 1]; }

private:
    std::array<NoisyObservation, kCapacity> buf_{};
    std::size_t head_ = 0;
    std::size_t size_ = 0;
};

/// Estimator interface so a learned model can replace the window statistic.
class CovarianceEstimator {
public:
    virtual ~CovarianceEstimator() = default;
    [[nodiscard]] virtual CovarianceEstimate estimate(const ObservationWindow& window) const = 0;
};

namespace detail {

// Residual variance after a least-squares line fit against the sample index,
// normalized by n - 2 so it is unbiased for i.i.d. noise about a line.
inline double detrended_variance(std::span<const double> y) {
    const auto n = static_cast<double>(y.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        mean_x += static_cast<double>(i);
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double dx = static_cast<double>(i) - mean_x;
        sxx += dx * dx;
        sxy += dx * (y[i] - mean_y);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double fit = mean_y + slope * (static_cast<double>(i) - mean_x);
        rss += (y[i] - fit) * (y[i] - fit);
    }
    return rss / (n - 2.0);
}

}  // namespace detail

class WindowVarianceEstimator final : public CovarianceEstimator {
public:
    explicit WindowVarianceEstimator(double floor = 1e-6) : floor_(floor) {}

    [[nodiscard]] CovarianceEstimate estimate(const ObservationWindow& window) const override {
        if (!window.full()) throw Error(ErrorCode::NotReady, "observation window not full");
        constexpr std::size_t n = ObservationWindow::kCapacity;
        std::array<double, n> r{}, psi{}, theta{}, phi{};
        for (std::size_t i = 0; i < n; ++i) {
            const auto& o = window[i].observed;
            r[i] = o.r;
            theta[i] = o.theta;
            // Angles are unwrapped against the previous sample.
            psi[i] = i == 0 ? o.psi : psi[i - 1] + angle_diff(o.psi, psi[i - 1]);
            phi[i] = i == 0 ? o.phi : phi[i - 1] + angle_diff(o.phi, phi[i - 1]);
        }
        auto v = [this](const auto& y) { return std::max(floor_, detail::detrended_variance(y)); };
        return {v(r), v(phi), v(theta), v(psi)};
    }

    [[nodiscard]] double floor() const noexcept { return floor_; }

private:
    double floor_;
};

[[nodiscard]] inline CovarianceEstimate estimate_covariance(const ObservationWindow& window, double floor = 1e-6) {
    return WindowVarianceEstimator(floor).estimate(window);
}

struct DisturbanceInterval {
    double start_s = 0.0;
    double end_s = 0.0;
    DisturbanceLevel level;
};

/// Piecewise-constant disturbance over time; zero outside every interval.
/// Where intervals overlap the first listed wins.
class DisturbanceSchedule {
public:
    DisturbanceSchedule() = default;
    explicit DisturbanceSchedule(std::vector<DisturbanceInterval> intervals) : intervals_(std::move(intervals)) {
        for (const auto& iv : intervals_) {
            if (!(iv.end_s >= iv.start_s) || !std::isfinite(iv.start_s) || !std::isfinite(iv.end_s) ||
                !iv.level.valid()) {
                throw Error(ErrorCode::InvalidInput, "invalid disturbance interval");
            }
        }
    }

    static DisturbanceSchedule constant(const DisturbanceLevel& level, double horizon_s = 1e9) {
        return DisturbanceSchedule({{0.0, horizon_s, level}});
    }

    [[nodiscard]] DisturbanceLevel level_at(double t) const {
        for (const auto& iv : intervals_) {
            if (t >= iv.start_s && t < iv.end_s) return iv.level;
        }
        return {};
    }

    [[nodiscard]] const std::vector<DisturbanceInterval>& intervals() const noexcept { return intervals_; }

private:
    std::vector<DisturbanceInterval> intervals_;
};

}  // namespace uds
