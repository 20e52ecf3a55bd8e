#pragma once

// Training-set generation for the planner switcher.
//
// Each episode places a gate (and the one after it) and a drone in a random
// flight state, fills the observation window while the drone coasts, then
// flies every moving planner from that identical starting point over a few
// shared noise streams. The cheapest planner that gets through the gate is
// the label; safe mode is costed analytically as a hover penalty.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "uds/classifier.hpp"
#include "uds/perception.hpp"
#include "uds/planners.hpp"
#include "uds/scenarios.hpp"
#include "uds/simulator.hpp"
#include "uds/switcher.hpp"

namespace uds {

struct SwitchSample {
    FeatureVector features{};
    PlannerKind label = PlannerKind::SafeMode;
    std::array<double, kNumPlanners> cost{};  // kCrashCost for planners that crashed
};

struct DatasetConfig {
    std::size_t episodes = 1000;
    /// Fraction of episodes with no disturbance at all.
    double clean_fraction = 0.35;
    double magnitude_min = 0.5;
    double magnitude_max = 10.0;

    double distance_min = 0.8;
    double distance_max = 7.0;
    double approach_angle = 0.6;  // max angle between approach and gate normal [rad]
    double height_offset = 0.5;
    double speed_max = 3.0;
    double heading_jitter = 0.5;  // velocity direction spread around the line of sight [rad]
    double yaw_jitter = 0.3;
    double next_gate_spacing = 5.5;
    double next_gate_turn = 0.7;

    /// Safe-mode costing: hover this long, then fly the rest at the
    /// MinVelocity cruise speed.
    double safe_hover = 1.5;

    /// Noise realizations flown per planner. A planner counts as crashed when
    /// more than `crash_tolerance` of its rollouts crash; otherwise its cost
    /// is the mean over the successful ones.
    std::size_t rollouts = 5;
    double crash_tolerance = 0.0;
};

struct DatasetSummary {
    std::size_t samples = 0;
    std::size_t discarded = 0;
    std::array<std::size_t, kNumPlanners> label_counts{};
};

struct Dataset {
    std::vector<SwitchSample> samples;
    DatasetSummary summary;
};

namespace detail {

inline std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t episode, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(episode), static_cast<std::uint32_t>(episode >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace detail

/// Hover penalty cost for safe mode from `state` toward `gate`.
[[nodiscard]] inline double safe_mode_cost(const DroneState& state, const Pose& gate, const DatasetConfig& data,
                                           const SimConfig& sim) {
    const double remaining = norm(gate.position - state.position) / sim.planner.cruise(PlannerKind::MinVelocity);
    return planner_cost(state, gate, data.safe_hover + remaining, sim.cost);
}

/// Label = index of the minimum finite cost, ties to the earlier planner.
/// Returns nullopt when every cost is infinite.
[[nodiscard]] inline std::optional<PlannerKind> label_from_costs(const std::array<double, kNumPlanners>& cost) {
    std::optional<PlannerKind> best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kNumPlanners; ++i) {
        if (std::isfinite(cost[i]) && cost[i] < best_cost) {
            best_cost = cost[i];
            best = static_cast<PlannerKind>(i);
        }
    }
    return best;
}

/// One generated episode; nullopt when all options crash.
[[nodiscard]] inline std::optional<SwitchSample> generate_sample(std::uint64_t seed, std::uint64_t episode,
                                                                 const DatasetConfig& data, const SimConfig& sim) {
    std::mt19937_64 rng(detail::episode_seed(seed, episode, 0));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

    Track track;
    const double gate_yaw = uniform(-kPi, kPi);
    const Pose gate{{0.0, 0.0, 2.0}, gate_yaw};
    const double next_heading = gate_yaw + uniform(-data.next_gate_turn, data.next_gate_turn);
    const Pose next{gate.position + Vec3{std::cos(next_heading), std::sin(next_heading), 0.0} * data.next_gate_spacing,
                    wrap_angle(next_heading)};
    track.gates = {gate, next};
    track.bounds_min = {-15.0, -15.0, 0.0};
    track.bounds_max = {15.0, 15.0, 8.0};

    const double distance = uniform(data.distance_min, data.distance_max);
    const double approach = gate_yaw + kPi + uniform(-data.approach_angle, data.approach_angle);
    DroneState start;
    start.position = gate.position + Vec3{std::cos(approach), std::sin(approach), 0.0} * distance;
    start.position.z += uniform(-data.height_offset, data.height_offset);
    const Vec3 los = gate.position - start.position;
    const double los_heading = std::atan2(los.y, los.x);
    const double speed = uniform(0.0, data.speed_max);
    const double heading = los_heading + uniform(-data.heading_jitter, data.heading_jitter);
    start.velocity = Vec3{std::cos(heading), std::sin(heading), 0.0} * speed;
    start.yaw = wrap_angle(los_heading + uniform(-data.yaw_jitter, data.yaw_jitter));

    const double magnitude = u01(rng) < data.clean_fraction ? 0.0 : uniform(data.magnitude_min, data.magnitude_max);
    const DisturbanceLevel level = sample_level(magnitude, rng);
    const auto schedule = DisturbanceSchedule::constant(level);

    // Coast while the observation window fills.
    EpisodeStart begin;
    for (std::size_t k = 0; k < ObservationWindow::kCapacity; ++k) {
        if (k > 0) start.position += start.velocity * sim.dt;
        const DisturbanceLevel seen = sim.effective_disturbance(level, start.velocity);
        begin.current.push(observe_from(start.pose(), gate, seen, rng, sim.noise, static_cast<long>(k)));
        begin.next.push(observe_from(start.pose(), next, seen, rng, sim.noise, static_cast<long>(k)));
    }
    begin.state = start;
    begin.t0 = 0.0;

    const auto cov = WindowVarianceEstimator(sim.estimator_floor).estimate(begin.current);
    const Pose observed_gate = detail::average_gate(begin.current);

    SwitchSample sample;
    sample.features = extract_features(start, observed_gate, cov);

    EpisodeOptions options;
    options.start = &begin;
    options.stop_after_gates = 1;
    for (std::size_t p = 0; p < 4; ++p) {
        const auto allowed = static_cast<std::size_t>(data.crash_tolerance * static_cast<double>(data.rollouts));
        std::size_t crashed = 0;
        double total = 0.0;
        for (std::size_t k = 0; k < data.rollouts && crashed <= allowed; ++k) {
            const auto r = run_episode(track, FixedPolicy{static_cast<PlannerKind>(p)}, schedule,
                                       detail::episode_seed(seed, episode, 1 + k), sim, options);
            if (r.success) {
                total += planner_cost(r.final_state, gate, *r.lap_time, sim.cost);
            } else {
                ++crashed;
            }
        }
        sample.cost[p] = crashed > allowed ? kCrashCost : total / static_cast<double>(data.rollouts - crashed);
    }
    sample.cost[index_of(PlannerKind::SafeMode)] = safe_mode_cost(start, gate, data, sim);

    const auto label = label_from_costs(sample.cost);
    if (!label) return std::nullopt;
    sample.label = *label;
    return sample;
}

/// Collects `data.episodes` labelled samples; episodes where every planner
/// crashed are discarded and replaced by further episodes (at most
/// kMaxAttemptFactor times the target). Deterministic in `seed`; episode k
/// always uses the same random streams.
inline constexpr std::size_t kMaxAttemptFactor = 10;

[[nodiscard]] inline Dataset generate_dataset(const DatasetConfig& data, const SimConfig& sim, std::uint64_t seed) {
    if (data.episodes == 0) throw Error(ErrorCode::Config, "dataset needs at least one episode");
    if (data.rollouts == 0) throw Error(ErrorCode::Config, "dataset needs at least one rollout per planner");
    Dataset ds;
    ds.samples.reserve(data.episodes);
    const std::size_t max_attempts = data.episodes * kMaxAttemptFactor;
    for (std::size_t k = 0; ds.samples.size() < data.episodes && k < max_attempts; ++k) {
        auto s = generate_sample(seed, k, data, sim);
        if (!s) {
            ++ds.summary.discarded;
            continue;
        }
        ++ds.summary.label_counts[index_of(s->label)];
        ds.samples.push_back(*s);
    }
    ds.summary.samples = ds.samples.size();
    return ds;
}

/// Fit the switching classifier on labelled samples.
[[nodiscard]] inline TrainResult train_switcher(std::span<const SwitchSample> samples, const TrainConfig& config) {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    x.reserve(samples.size());
    y.reserve(samples.size());
    for (const auto& s : samples) {
        x.emplace_back(s.features.begin(), s.features.end());
        y.push_back(static_cast<int>(index_of(s.label)));
    }
    return train_classifier(x, y, kNumPlanners, config);
}

}  // namespace uds
