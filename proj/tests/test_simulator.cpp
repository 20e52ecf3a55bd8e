#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "uds/scenarios.hpp"
#include "uds/simulator.hpp"

using namespace uds;
using Catch::Matchers::WithinAbs;

namespace {

Track straight_track() {
    Track t;
    t.gates = {{{5, 0, 2}, 0.0}, {{10, 0, 2}, 0.0}, {{15, 0, 2}, 0.0}};
    t.start = {{0, 0, 2}, 0.0};
    return t;
}

PolynomialTrajectory line(double speed) {
    BoundaryConditions bc;
    bc.t_f = 4.0;
    bc.p_f = {speed * 4.0, 0, 0};
    return plan_min_velocity(bc);
}

}  // namespace

TEST_CASE("perfect tracking without gains", "[simulator]") {
    BoundaryConditions bc;
    bc.t_f = 2.0;
    bc.p_f = {2, 1, 0};
    const auto traj = plan_min_jerk(bc, false);
    TrackingConfig cfg;
    cfg.k_p = 0.0;
    auto error_after_step = [&](double dt) {
        const double t = 0.6;
        const auto ref = traj.evaluate(t);
        DroneState s;
        s.position = ref.position;
        s.velocity = ref.velocity;
        const auto n = step(s, traj, t, dt, cfg);
        return norm(n.position - traj.evaluate(t + dt).position);
    };
    const double e1 = error_after_step(0.02);
    const double e2 = error_after_step(0.01);
    CHECK(e1 < 0.02 * 0.02 * 5.0);
    CHECK(e1 / e2 > 3.0);  // second order in dt
}

TEST_CASE("offset state contracts toward a stationary reference", "[simulator]") {
    DroneState hover;
    const auto hold = plan_safe_mode(hover, 10.0);
    DroneState s;
    s.position = {0.3, -0.2, 0.1};
    double last = norm(s.position);
    for (int k = 0; k < 200; ++k) {
        s = step(s, hold, k * 0.02, 0.02);
        const double e = norm(s.position);
        CHECK(e < last);
        last = e;
    }
}

TEST_CASE("speed saturates at v_max", "[simulator]") {
    const auto fast = line(10.0);
    TrackingConfig cfg;
    DroneState s;
    double t = 0.0;
    for (int k = 0; k < 100; ++k) {
        const DroneState prev = s;
        s = step(s, fast, t, 0.02, cfg);
        t += 0.02;
        CHECK(norm(s.velocity) <= cfg.v_max + 1e-12);
        CHECK(norm(s.position - prev.position) <= cfg.v_max * 0.02 + 1e-12);
        CHECK(norm(s.velocity - prev.velocity) <= cfg.a_max * 0.02 + 1e-12);
    }
    CHECK_THAT(norm(s.velocity), WithinAbs(cfg.v_max, 1e-9));
}

TEST_CASE("step rejects bad input", "[simulator]") {
    const auto traj = line(1.0);
    DroneState s;
    CHECK_THROWS_AS(step(s, traj, 0.0, 0.0), Error);
    CHECK_THROWS_AS(step(s, traj, 0.0, 0.2), Error);
    s.position.x = std::nan("");
    try {
        (void)step(s, traj, 0.0, 0.02);
        FAIL("expected a simulation fault");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SimulationFault);
    }
}

TEST_CASE("gate crossing classification", "[simulator]") {
    const Pose gate{{0, 0, 0}, 0.0};
    const GateGeometry g{1.6, 0.2, 0.2};
    const auto center = check_gate_pass({-0.1, 0, 0}, {0.1, 0, 0}, gate, g);
    CHECK(center.result == GateResult::Passed);
    CHECK(center.forward);
    CHECK(check_gate_pass({0.1, 0, 0}, {-0.1, 0, 0}, gate, g).result == GateResult::Passed);
    CHECK_FALSE(check_gate_pass({0.1, 0, 0}, {-0.1, 0, 0}, gate, g).forward);
    CHECK(check_gate_pass({-0.1, 0.8, 0}, {0.1, 0.8, 0}, gate, g).result == GateResult::Struck);
    CHECK(check_gate_pass({-0.1, 0, -0.8}, {0.1, 0, -0.8}, gate, g).result == GateResult::Struck);
    CHECK(check_gate_pass({-0.1, 3.0, 0}, {0.1, 3.0, 0}, gate, g).result == GateResult::Neither);
    CHECK(check_gate_pass({-1, 0.2, 0}, {-1, 0.4, 0}, gate, g).result == GateResult::Neither);
    // Grazing the frame without crossing the plane.
    CHECK(check_gate_pass({-0.3, 0.8, 0}, {-0.1, 0.8, 0}, gate, g).result == GateResult::Struck);

    // Rotated gate: normal along +y.
    const Pose turned{{1, 1, 0}, kPi / 2};
    CHECK(check_gate_pass({1, 0.9, 0}, {1, 1.1, 0}, turned, g).result == GateResult::Passed);
}

TEST_CASE("noiseless min velocity completes a straight track", "[simulator]") {
    SimConfig cfg;
    cfg.noise.base = {0, 0, 0, 0};
    const auto r = run_episode(straight_track(), FixedPolicy{PlannerKind::MinVelocity}, {}, 1, cfg);
    CHECK(r.success);
    CHECK(r.crash_cause == CrashCause::None);
    REQUIRE(r.lap_time.has_value());
    CHECK(*r.lap_time > 0.0);
    CHECK(r.gates_passed == 3);
    const auto decisions = std::accumulate(r.planner_usage.begin(), r.planner_usage.end(), std::size_t{0});
    CHECK(decisions == r.segments.size());
    CHECK(r.planner_usage[index_of(PlannerKind::SafeMode)] > 0);  // estimator warm-up
}

TEST_CASE("every fixed planner finishes a clean sampled track", "[simulator]") {
    std::mt19937_64 rng(4);
    const Track track = sample_track({}, rng);
    for (auto k : {PlannerKind::MinVelocity, PlannerKind::MinAcceleration, PlannerKind::MinJerk,
                   PlannerKind::MinJerkFullStop}) {
        const auto r = run_episode(track, FixedPolicy{k}, {}, 2);
        INFO(to_string(k));
        CHECK(r.success);
    }
}

TEST_CASE("safe mode alone never finishes", "[simulator]") {
    const auto r = run_episode(straight_track(), FixedPolicy{PlannerKind::SafeMode}, {}, 1);
    CHECK_FALSE(r.success);
    CHECK(r.crash_cause == CrashCause::Timeout);
    CHECK_FALSE(r.lap_time.has_value());
}

TEST_CASE("episodes are deterministic in the seed", "[simulator]") {
    const auto schedule = DisturbanceSchedule::constant({2.0, 1.0, 0.05});
    std::vector<StepLog> la, lb;
    EpisodeOptions oa, ob;
    oa.step_log = &la;
    ob.step_log = &lb;
    const auto a = run_episode(straight_track(), FixedPolicy{PlannerKind::MinAcceleration}, schedule, 77, {}, oa);
    const auto b = run_episode(straight_track(), FixedPolicy{PlannerKind::MinAcceleration}, schedule, 77, {}, ob);
    CHECK(a.success == b.success);
    CHECK(a.lap_time == b.lap_time);
    CHECK(a.sim_time == b.sim_time);
    CHECK(a.planner_usage == b.planner_usage);
    REQUIRE(la.size() == lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
        CHECK(la[i].state.position == lb[i].state.position);
        CHECK(la[i].observed.r == lb[i].observed.r);
    }
}

TEST_CASE("episodes stay physical", "[simulator]") {
    const auto schedule = DisturbanceSchedule::constant({3.0, 2.0, 0.05});
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::vector<StepLog> log;
        EpisodeOptions opts;
        opts.step_log = &log;
        const auto r = run_episode(straight_track(), FixedPolicy{PlannerKind::MinJerk}, schedule, seed, {}, opts);
        CHECK(r.success != (r.crash_cause != CrashCause::None));
        const TrackingConfig limits;
        for (std::size_t i = 1; i < log.size(); ++i) {
            CHECK(is_finite(log[i].state));
            CHECK(norm(log[i].state.position - log[i - 1].state.position) <= limits.v_max * 0.02 + 1e-9);
        }
    }
}

TEST_CASE("heavy noise crashes plain minimum jerk most of the time", "[simulator]") {
    std::mt19937_64 rng(10);
    const ScheduleDistribution dist;
    int crashes = 0;
    constexpr int n = 30;
    for (int k = 0; k < n; ++k) {
        const Track track = sample_track({}, rng);
        const auto schedule = sample_schedule(NoiseScenario::Heavy, dist, rng);
        if (!run_episode(track, FixedPolicy{PlannerKind::MinJerk}, schedule, 1000 + k).success) ++crashes;
    }
    CHECK(crashes > n / 2);
}

TEST_CASE("episode configuration errors", "[simulator]") {
    CHECK_THROWS_AS(run_episode(Track{}, FixedPolicy{PlannerKind::MinVelocity}, {}, 1), Error);
    Track close = straight_track();
    close.gates[1].position = {5.5, 0, 2};
    CHECK_THROWS_AS(run_episode(close, FixedPolicy{PlannerKind::MinVelocity}, {}, 1), Error);
    try {
        (void)run_episode(straight_track(), UdsPolicy{nullptr}, {}, 1);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
    }
    SimConfig bad;
    bad.dt = 0.5;
    CHECK_THROWS_AS(run_episode(straight_track(), FixedPolicy{PlannerKind::MinVelocity}, {}, 1, bad), Error);
}

TEST_CASE("sampled tracks are valid and seeded", "[simulator]") {
    std::mt19937_64 a(3), b(3);
    for (int i = 0; i < 50; ++i) {
        const Track ta = sample_track({}, a);
        const Track tb = sample_track({}, b);
        CHECK_NOTHROW(ta.validate());
        REQUIRE(ta.gates.size() == tb.gates.size());
        for (std::size_t g = 0; g < ta.gates.size(); ++g) CHECK(ta.gates[g].position == tb.gates[g].position);
    }
}

TEST_CASE("disturbance presets", "[simulator]") {
    std::mt19937_64 rng(5);
    const ScheduleDistribution dist;
    CHECK(sample_schedule(NoiseScenario::Clean, dist, rng).intervals().empty());
    const auto heavy = sample_schedule(NoiseScenario::Heavy, dist, rng);
    CHECK(heavy.level_at(0.0).magnitude() >= dist.magnitude_min - 1e-9);
    CHECK(heavy.level_at(100.0).magnitude() <= dist.magnitude_max + 1e-9);
    const auto mixed = sample_schedule(NoiseScenario::Mixed, dist, rng);
    int noisy = 0, clean = 0;
    for (double t = 0.0; t < dist.horizon; t += 0.1) (mixed.level_at(t).magnitude() > 0 ? noisy : clean)++;
    CHECK(noisy > 0);
    CHECK(clean > 0);
}
