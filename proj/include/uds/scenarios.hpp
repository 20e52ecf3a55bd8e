#pragma once

// Random track layouts and disturbance schedules for experiments.

#include <algorithm>
#include <cmath>
#include <random>
#include <string_view>
#include <vector>

#include "uds/error.hpp"
#include "uds/geometry.hpp"
#include "uds/perception.hpp"
#include "uds/simulator.hpp"

namespace uds {

struct TrackDistribution {
    int gates = 6;
    double spacing_min = 4.0;
    double spacing_max = 7.0;
    double max_turn = 0.7;  // rad, heading change between consecutive legs
    double height = 2.0;
    double height_jitter = 0.5;
    double start_distance = 3.0;
    double bounds_padding = 6.0;
};

/// Gates are laid out leg by leg; each gate faces along its incoming leg.
[[nodiscard]] inline Track sample_track(const TrackDistribution& dist, std::mt19937_64& rng) {
    if (dist.gates < 1 || !(dist.spacing_min > 1.6) || dist.spacing_max < dist.spacing_min) {
        throw Error(ErrorCode::Config, "invalid track distribution");
    }
    std::uniform_real_distribution<double> spacing(dist.spacing_min, dist.spacing_max);
    std::uniform_real_distribution<double> turn(-dist.max_turn, dist.max_turn);
    std::uniform_real_distribution<double> dz(-dist.height_jitter, dist.height_jitter);

    Track track;
    Vec3 pos{0.0, 0.0, dist.height};
    double heading = 0.0;
    track.start = {pos - Vec3{dist.start_distance, 0.0, 0.0}, 0.0};
    pos = track.start.position;
    for (int i = 0; i < dist.gates; ++i) {
        if (i > 0) heading += turn(rng);
        const double leg = i == 0 ? dist.start_distance : spacing(rng);
        pos = pos + Vec3{std::cos(heading), std::sin(heading), 0.0} * leg;
        pos.z = dist.height + (i == 0 ? 0.0 : dz(rng));
        track.gates.push_back({pos, wrap_angle(heading)});
    }

    Vec3 lo = track.start.position, hi = track.start.position;
    for (const auto& g : track.gates) {
        lo = {std::min(lo.x, g.position.x), std::min(lo.y, g.position.y), std::min(lo.z, g.position.z)};
        hi = {std::max(hi.x, g.position.x), std::max(hi.y, g.position.y), std::max(hi.z, g.position.z)};
    }
    const double pad = dist.bounds_padding;
    track.bounds_min = {lo.x - pad, lo.y - pad, 0.0};
    track.bounds_max = {hi.x + pad, hi.y + pad, hi.z + pad};
    return track;
}

enum class NoiseScenario { Clean, Mixed, Heavy };

[[nodiscard]] constexpr std::string_view to_string(NoiseScenario s) {
    switch (s) {
        case NoiseScenario::Clean: return "clean";
        case NoiseScenario::Mixed: return "mixed";
        case NoiseScenario::Heavy: return "heavy";
    }
    return "unknown";
}

struct ScheduleDistribution {
    double horizon = 120.0;
    double clean_min = 1.5, clean_max = 4.0;  // gap between bursts [s]
    double burst_min = 1.0, burst_max = 3.0;  // burst length [s]
    double magnitude_min = 5.0, magnitude_max = 8.0;
};

/// Split a target magnitude into brightness/contrast/saturation parts.
[[nodiscard]] inline DisturbanceLevel sample_level(double magnitude, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double sat_share = 0.02 + 0.06 * u(rng);  // saturation carries a few percent of the magnitude
    const double b_share = u(rng);
    const double rest = magnitude * (1.0 - sat_share);
    return {rest * b_share, rest * (1.0 - b_share), magnitude * sat_share / 10.0};
}

[[nodiscard]] inline DisturbanceSchedule sample_schedule(NoiseScenario scenario, const ScheduleDistribution& dist,
                                                         std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(dist.magnitude_min, dist.magnitude_max);
    switch (scenario) {
        case NoiseScenario::Clean: return {};
        case NoiseScenario::Heavy: return DisturbanceSchedule::constant(sample_level(mag(rng), rng), dist.horizon);
        case NoiseScenario::Mixed: break;
    }
    std::uniform_real_distribution<double> gap(dist.clean_min, dist.clean_max);
    std::uniform_real_distribution<double> burst(dist.burst_min, dist.burst_max);
    std::vector<DisturbanceInterval> intervals;
    double t = gap(rng) * 0.5;
    while (t < dist.horizon) {
        const double len = burst(rng);
        intervals.push_back({t, t + len, sample_level(mag(rng), rng)});
        t += len + gap(rng);
    }
    return DisturbanceSchedule(std::move(intervals));
}

}  // namespace uds
