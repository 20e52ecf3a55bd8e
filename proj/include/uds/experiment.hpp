#pragma once

// Seeded racing experiments: every policy flies the same tracks, disturbance
// schedules and noise streams, and results are reduced to success rate, lap
// time over successful episodes, and planner usage.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uds/dataset.hpp"
#include "uds/scenarios.hpp"
#include "uds/simulator.hpp"

namespace uds {

struct ExperimentConfig {
    std::size_t episodes = 40;
    NoiseScenario scenario = NoiseScenario::Mixed;
    TrackDistribution tracks;
    ScheduleDistribution schedules;
    SimConfig sim;
    /// When set, every episode flies this track / schedule instead of a
    /// sampled one.
    std::optional<Track> fixed_track;
    std::optional<DisturbanceSchedule> fixed_schedule;
};

struct EpisodeOutcome {
    bool success = false;
    std::optional<double> lap_time;
    CrashCause crash_cause = CrashCause::None;
    std::size_t gates_passed = 0;
};

struct PolicyMetrics {
    std::string policy;
    std::size_t episodes = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;  // percent
    std::optional<double> lap_mean;
    std::optional<double> lap_std;
    std::array<std::size_t, kNumPlanners> usage_counts{};
    std::array<double, kNumPlanners> usage_percent{};
    std::array<std::size_t, kNumPlanners> noisy_usage_counts{};
    std::vector<EpisodeOutcome> outcomes;  // by episode index
};

/// Success rate and lap statistics; laps are averaged over successful
/// episodes only and are absent when there are none. lap_std is the sample
/// standard deviation (0 for a single success).
[[nodiscard]] inline PolicyMetrics summarize(std::string policy, std::vector<EpisodeOutcome> outcomes,
                                             const std::array<std::size_t, kNumPlanners>& usage = {},
                                             const std::array<std::size_t, kNumPlanners>& noisy_usage = {}) {
    PolicyMetrics m;
    m.policy = std::move(policy);
    m.episodes = outcomes.size();
    double sum = 0.0;
    for (const auto& o : outcomes) {
        if (!o.success) continue;
        ++m.successes;
        sum += *o.lap_time;
    }
    if (m.episodes > 0) m.success_rate = 100.0 * static_cast<double>(m.successes) / static_cast<double>(m.episodes);
    if (m.successes > 0) {
        const double mean = sum / static_cast<double>(m.successes);
        double ss = 0.0;
        for (const auto& o : outcomes)
            if (o.success) ss += (*o.lap_time - mean) * (*o.lap_time - mean);
        m.lap_mean = mean;
        m.lap_std = m.successes > 1 ? std::sqrt(ss / static_cast<double>(m.successes - 1)) : 0.0;
    }
    m.usage_counts = usage;
    m.noisy_usage_counts = noisy_usage;
    std::size_t total = 0;
    for (auto c : usage) total += c;
    if (total > 0) {
        for (std::size_t i = 0; i < kNumPlanners; ++i) {
            m.usage_percent[i] = 100.0 * static_cast<double>(usage[i]) / static_cast<double>(total);
        }
    }
    m.outcomes = std::move(outcomes);
    return m;
}

/// Track, schedule and noise seed of episode k; shared by every policy.
struct EpisodeSetup {
    Track track;
    DisturbanceSchedule schedule;
    std::uint64_t noise_seed = 0;
};

[[nodiscard]] inline EpisodeSetup episode_setup(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t k) {
    std::mt19937_64 rng(detail::episode_seed(seed, k, 0));
    EpisodeSetup s;
    s.track = cfg.fixed_track ? *cfg.fixed_track : sample_track(cfg.tracks, rng);
    s.schedule = cfg.fixed_schedule ? *cfg.fixed_schedule : sample_schedule(cfg.scenario, cfg.schedules, rng);
    s.noise_seed = detail::episode_seed(seed, k, 1);
    return s;
}

[[nodiscard]] inline std::vector<PolicyMetrics> run_experiment(const ExperimentConfig& cfg,
                                                               const std::vector<Policy>& policies,
                                                               std::uint64_t seed) {
    if (cfg.episodes == 0) throw Error(ErrorCode::Config, "experiment needs at least one episode");
    std::vector<EpisodeSetup> setups;
    setups.reserve(cfg.episodes);
    for (std::size_t k = 0; k < cfg.episodes; ++k) setups.push_back(episode_setup(cfg, seed, k));

    std::vector<PolicyMetrics> out;
    for (const auto& policy : policies) {
        std::vector<EpisodeOutcome> outcomes;
        std::array<std::size_t, kNumPlanners> usage{}, noisy{};
        for (const auto& s : setups) {
            const EpisodeResult r = run_episode(s.track, policy, s.schedule, s.noise_seed, cfg.sim);
            outcomes.push_back({r.success, r.lap_time, r.crash_cause, r.gates_passed});
            for (std::size_t i = 0; i < kNumPlanners; ++i) {
                usage[i] += r.planner_usage[i];
                noisy[i] += r.planner_usage_noisy[i];
            }
        }
        out.push_back(summarize(policy_name(policy), std::move(outcomes), usage, noisy));
    }
    return out;
}

struct SharedLaps {
    double a = 0.0;
    double b = 0.0;
    std::size_t count = 0;
};

/// Mean lap time of `a` and `b` over episodes both completed; nullopt when
/// they share no successful episode.
[[nodiscard]] inline std::optional<SharedLaps> shared_lap_means(const PolicyMetrics& a, const PolicyMetrics& b) {
    SharedLaps s;
    const std::size_t n = std::min(a.outcomes.size(), b.outcomes.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (!a.outcomes[k].success || !b.outcomes[k].success) continue;
        s.a += *a.outcomes[k].lap_time;
        s.b += *b.outcomes[k].lap_time;
        ++s.count;
    }
    if (s.count == 0) return std::nullopt;
    s.a /= static_cast<double>(s.count);
    s.b /= static_cast<double>(s.count);
    return s;
}

}  // namespace uds
