#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "uds/switcher.hpp"

using namespace uds;
using Catch::Matchers::WithinAbs;

TEST_CASE("feature order and names", "[switcher]") {
    CHECK(kFeatureNames.size() == 17);
    CHECK(kFeatureNames.front() == "dx");
    CHECK(kFeatureNames.back() == "sigma2_sum");
}

TEST_CASE("drone at the gate at rest", "[switcher]") {
    DroneState s;
    s.position = {1, 2, 3};
    const CovarianceEstimate floor{1e-6, 1e-6, 1e-6, 1e-6};
    const auto f = extract_features(s, {{1, 2, 3}, 0.0}, floor);
    for (std::size_t i = 0; i < 12; ++i) {
        if (i == 4) continue;  // inclination of a zero vector is 0 by convention
        CHECK(f[i] == 0.0);
    }
    CHECK(f[4] == 0.0);
    CHECK(f[12] == 1e-6);
    CHECK_THAT(f[16], WithinAbs(4e-6, 1e-18));
}

TEST_CASE("covariance tail of the feature vector", "[switcher]") {
    DroneState s;
    const auto f = extract_features(s, {{3, 0, 0}, 0.0}, {0.01, 0.04, 0.0, 0.09});
    CHECK(f[12] == 0.01);
    CHECK(f[13] == 0.04);
    CHECK(f[14] == 0.0);
    CHECK(f[15] == 0.09);
    CHECK_THAT(f[16], WithinAbs(0.14, 1e-15));
}

TEST_CASE("features are expressed in the yaw frame", "[switcher]") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-5.0, 5.0), yaw(-kPi, kPi), pos(0.0, 0.5);
    for (int i = 0; i < 500; ++i) {
        DroneState s;
        s.position = {u(rng), u(rng), u(rng)};
        s.velocity = {u(rng), u(rng), u(rng)};
        s.angular_velocity = {0.0, 0.0, u(rng)};
        s.yaw = yaw(rng);
        const Pose gate{{u(rng), u(rng), u(rng)}, yaw(rng)};
        const CovarianceEstimate cov{pos(rng), pos(rng), pos(rng), pos(rng)};
        const auto f = extract_features(s, gate, cov);

        CHECK(f[16] == cov.sigma2_r + cov.sigma2_phi + cov.sigma2_theta + cov.sigma2_psi);
        // Rotating the whole scene about z leaves every feature unchanged.
        const double turn = yaw(rng);
        DroneState r = s;
        r.position = rotate_z(s.position, turn);
        r.velocity = rotate_z(s.velocity, turn);
        r.yaw = wrap_angle(s.yaw + turn);
        const Pose rg{rotate_z(gate.position, turn), wrap_angle(gate.yaw + turn)};
        const auto g = extract_features(r, rg, cov);
        for (std::size_t k = 0; k < kNumFeatures; ++k) {
            if (k == 3 || k == 5) {
                CHECK_THAT(angle_diff(f[k], g[k]), WithinAbs(0.0, 1e-9));
            } else {
                CHECK_THAT(f[k], WithinAbs(g[k], 1e-9));
            }
        }
        for (std::size_t k : {3u, 5u}) {
            CHECK(f[k] > -kPi);
            CHECK(f[k] <= kPi);
        }
    }
}

TEST_CASE("cost examples", "[switcher]") {
    DroneState s;
    s.yaw = kPi / 2;
    CHECK_THAT(planner_cost(s, {{0, 0, 0}, 0.0}, 3.0), WithinAbs(0.0, 1e-15));

    DroneState t;
    t.yaw = kPi / 2;
    CHECK_THAT(planner_cost(t, {{3, 4, 0}, 0.0}, 2.0), WithinAbs(10.0, 1e-12));

    CostConfig no_offset;
    no_offset.yaw_offset = 0.0;
    DroneState u;
    CHECK_THAT(planner_cost(u, {{0, 0, 0}, 0.5}, 1.0, no_offset), WithinAbs(0.5, 1e-15));
    // Yaw difference is wrapped before the absolute value.
    u.yaw = kPi - 0.1;
    CHECK_THAT(planner_cost(u, {{0, 0, 0}, -kPi + 0.1}, 1.0, no_offset), WithinAbs(0.2, 1e-12));

    CHECK_THROWS_AS(planner_cost(u, {}, 0.0), Error);
}

TEST_CASE("cost is linear in arrival time", "[switcher]") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 3.0), t(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        DroneState s;
        s.position = {u(rng), u(rng), u(rng)};
        s.yaw = u(rng);
        const Pose d{{u(rng), u(rng), u(rng)}, u(rng)};
        const double T = t(rng);
        CHECK_THAT(planner_cost(s, d, 2 * T), WithinAbs(2 * planner_cost(s, d, T), 1e-12));
    }
}

TEST_CASE("selection is the argmax", "[switcher]") {
    const std::vector<double> p{0.1, 0.2, 0.3, 0.15, 0.25};
    CHECK(select_from_probabilities(p) == PlannerKind::MinJerk);
    const std::vector<double> tie{0.3, 0.3, 0.1, 0.1, 0.2};
    CHECK(select_from_probabilities(tie) == PlannerKind::MinVelocity);

    // Scaling the logits keeps the winner.
    std::vector<double> logits{0.4, -1.0, 2.0, 0.3, 1.1};
    for (double k : {0.5, 1.0, 3.0}) {
        std::vector<double> z;
        for (double v : logits) z.push_back(k * v);
        softmax(z);
        CHECK(select_from_probabilities(z) == PlannerKind::MinJerk);
    }
}

TEST_CASE("non-finite features fall back to safe mode", "[switcher]") {
    std::mt19937_64 rng(1);
    ClassifierModel m;
    m.network = Mlp({17, 8, 5}, rng);
    m.normalization = {std::vector<double>(17, 0.0), std::vector<double>(17, 1.0)};
    FeatureVector f{};
    const auto ok = select_planner(m, f);
    CHECK_FALSE(ok.fallback);
    f[12] = std::numeric_limits<double>::quiet_NaN();
    const auto bad = select_planner(m, f);
    CHECK(bad.fallback);
    CHECK(bad.planner == PlannerKind::SafeMode);
}
