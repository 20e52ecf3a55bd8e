#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "uds/perception.hpp"

using namespace uds;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const GatePoseSpherical kPose{4.0, 0.3, kPi / 2, -0.2};

ObservationWindow fill(const GatePoseSpherical& pose, const DisturbanceLevel& d, std::mt19937_64& rng,
                       const NoiseModel& noise = {}) {
    ObservationWindow w;
    for (std::size_t i = 0; i < ObservationWindow::kCapacity; ++i) w.push(observe(pose, d, rng, noise));
    return w;
}

NoisyObservation at(double r, double psi, double theta, double phi) {
    NoisyObservation o;
    o.observed = {r, psi, theta, phi};
    return o;
}

}  // namespace

TEST_CASE("noiseless observation is the identity", "[perception]") {
    NoiseModel quiet;
    quiet.base = {0, 0, 0, 0};
    std::mt19937_64 rng(1);
    const auto o = observe(kPose, {}, rng, quiet, 7);
    CHECK(o.observed.r == kPose.r);
    CHECK(o.observed.psi == kPose.psi);
    CHECK(o.observed.theta == kPose.theta);
    CHECK(o.observed.phi == kPose.phi);
    CHECK(o.frame_index == 7);
}

TEST_CASE("observation is deterministic in the seed", "[perception]") {
    std::mt19937_64 a(99), b(99);
    const DisturbanceLevel d{1.0, 0.5, 0.02};
    for (int i = 0; i < 20; ++i) {
        const auto oa = observe(kPose, d, a);
        const auto ob = observe(kPose, d, b);
        CHECK(oa.observed.r == ob.observed.r);
        CHECK(oa.observed.psi == ob.observed.psi);
        CHECK(oa.observed.theta == ob.observed.theta);
        CHECK(oa.observed.phi == ob.observed.phi);
    }
}

TEST_CASE("empirical noise variance matches the model", "[perception]") {
    const DisturbanceLevel d{0.8, 0.4, 0.01};
    const NoiseModel noise;
    const auto s = noise.stddev(d, kPose.r);
    std::mt19937_64 rng(5);
    constexpr int n = 10000;
    std::array<double, 4> sum{}, sq{};
    for (int i = 0; i < n; ++i) {
        const auto o = observe(kPose, d, rng, noise).observed;
        const std::array<double, 4> e{o.r - kPose.r, angle_diff(o.psi, kPose.psi), o.theta - kPose.theta,
                                      angle_diff(o.phi, kPose.phi)};
        for (std::size_t c = 0; c < 4; ++c) {
            sum[c] += e[c];
            sq[c] += e[c] * e[c];
        }
    }
    for (std::size_t c = 0; c < 4; ++c) {
        const double mean = sum[c] / n;
        const double var = sq[c] / n - mean * mean;
        CHECK_THAT(var, WithinRel(s[c] * s[c], 0.10));
    }
}

TEST_CASE("noise grows with every disturbance knob", "[perception]") {
    const NoiseModel noise;
    const auto clean = noise.stddev({}, 3.0);
    for (const DisturbanceLevel d : {DisturbanceLevel{1, 0, 0}, DisturbanceLevel{0, 1, 0}, DisturbanceLevel{0, 0, 0.1}}) {
        const auto s = noise.stddev(d, 3.0);
        for (std::size_t c = 0; c < 4; ++c) CHECK(s[c] > clean[c]);
    }
    CHECK_THAT(DisturbanceLevel({1.0, 2.0, 0.3}).magnitude(), WithinAbs(6.0, 1e-15));
}

TEST_CASE("range never goes negative", "[perception]") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 2000; ++i) {
        const auto o = observe({0.01, 0.0, kPi / 2, 0.0}, {5, 5, 0.5}, rng);
        CHECK(o.observed.r >= 0.0);
        CHECK(o.observed.theta >= 0.0);
        CHECK(o.observed.theta <= kPi);
        CHECK(o.observed.psi > -kPi);
        CHECK(o.observed.psi <= kPi);
    }
}

TEST_CASE("covariance labels are squared shortest-arc errors", "[perception]") {
    const auto c = covariance_label({1.1, 0.3, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.2});
    CHECK_THAT(c.sigma2_r, WithinAbs(0.01, 1e-12));
    CHECK_THAT(c.sigma2_phi, WithinAbs(0.04, 1e-12));
    CHECK(c.sigma2_theta == 0.0);
    CHECK_THAT(c.sigma2_psi, WithinAbs(0.09, 1e-12));

    const auto zero = covariance_label(kPose, kPose);
    CHECK(covariance_sum(zero) == 0.0);

    const auto wrap = covariance_label({1, kPi - 0.1, 1, 0}, {1, -kPi + 0.1, 1, 0});
    CHECK_THAT(wrap.sigma2_psi, WithinAbs(0.04, 1e-12));
}

TEST_CASE("covariance sum", "[perception]") {
    CHECK_THAT(covariance_sum({0.01, 0.04, 0.0, 0.09}), WithinAbs(0.14, 1e-15));
    CHECK(covariance_sum({}) == 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const CovarianceEstimate c{u(rng), u(rng), u(rng), u(rng)};
        CHECK(covariance_sum(c) >= std::max({c.sigma2_r, c.sigma2_phi, c.sigma2_theta, c.sigma2_psi}));
    }
}

TEST_CASE("window keeps the last twelve frames", "[perception]") {
    ObservationWindow w;
    CHECK_THROWS_AS(estimate_covariance(w), Error);
    for (int i = 0; i < 11; ++i) w.push(at(i, 0, 1, 0));
    CHECK_FALSE(w.full());
    try {
        (void)estimate_covariance(w);
        FAIL("expected not-ready");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotReady);
    }
    for (int i = 11; i < 20; ++i) w.push(at(i, 0, 1, 0));
    CHECK(w.full());
    CHECK(w.size() == 12);
    CHECK(w[0].observed.r == 8.0);
    CHECK(w.latest().observed.r == 19.0);
}

TEST_CASE("estimator floor and detrending", "[perception]") {
    const double floor = 1e-6;
    ObservationWindow same, ramp;
    for (int i = 0; i < 12; ++i) {
        same.push(at(3.0, 0.2, 1.5, 0.1));
        ramp.push(at(3.0 + 0.25 * i, 0.2 - 0.01 * i, 1.5, 0.1 + 0.02 * i));
    }
    const auto a = estimate_covariance(same, floor);
    CHECK(a.sigma2_r == floor);
    CHECK(a.sigma2_phi == floor);
    CHECK(a.sigma2_theta == floor);
    CHECK(a.sigma2_psi == floor);
    const auto b = estimate_covariance(ramp, floor);
    CHECK(b.sigma2_r == floor);
    CHECK(b.sigma2_psi == floor);
    CHECK(b.sigma2_phi == floor);
}

TEST_CASE("ramp across the angle seam is unwrapped", "[perception]") {
    ObservationWindow w;
    for (int i = 0; i < 12; ++i) w.push(at(2.0, wrap_angle(kPi - 0.05 + 0.01 * i), 1.5, 0.0));
    CHECK(estimate_covariance(w, 1e-12).sigma2_psi < 1e-9);
}

TEST_CASE("estimator recovers injected variance", "[perception]") {
    // Noise about a linear trend; the detrended estimate is unbiased.
    std::mt19937_64 rng(12);
    const double sigma = 0.05;
    std::normal_distribution<double> n(0.0, sigma);
    constexpr int windows = 2000;
    std::array<double, 4> mean{};
    for (int k = 0; k < windows; ++k) {
        ObservationWindow w;
        for (int i = 0; i < 12; ++i) w.push(at(5.0 - 0.1 * i + n(rng), 0.01 * i + n(rng), 1.5 + n(rng), n(rng)));
        const auto c = estimate_covariance(w);
        mean[0] += c.sigma2_r;
        mean[1] += c.sigma2_phi;
        mean[2] += c.sigma2_theta;
        mean[3] += c.sigma2_psi;
    }
    for (double m : mean) CHECK_THAT(m / windows, WithinRel(sigma * sigma, 0.15));
}

TEST_CASE("estimates track covariance labels", "[perception]") {
    std::mt19937_64 rng(31);
    const DisturbanceLevel d{0.6, 0.3, 0.01};
    std::array<double, 4> est{}, lab{};
    constexpr int windows = 500;
    for (int k = 0; k < windows; ++k) {
        ObservationWindow w;
        for (int i = 0; i < 12; ++i) {
            const auto o = observe(kPose, d, rng);
            w.push(o);
            const auto l = covariance_label(o.true_pose, o.observed);
            lab[0] += l.sigma2_r / 12;
            lab[1] += l.sigma2_phi / 12;
            lab[2] += l.sigma2_theta / 12;
            lab[3] += l.sigma2_psi / 12;
        }
        const auto c = estimate_covariance(w);
        est[0] += c.sigma2_r;
        est[1] += c.sigma2_phi;
        est[2] += c.sigma2_theta;
        est[3] += c.sigma2_psi;
    }
    for (std::size_t c = 0; c < 4; ++c) CHECK_THAT(est[c], WithinRel(lab[c], 0.25));
}

TEST_CASE("estimated covariance rises with disturbance", "[perception]") {
    std::mt19937_64 rng(77);
    double prev = -1.0;
    for (const double g : {0.0, 1.0, 3.0}) {
        const DisturbanceLevel d{0.6 * g, 0.4 * g, 0.0};
        double total = 0.0;
        for (int k = 0; k < 200; ++k) total += covariance_sum(estimate_covariance(fill(kPose, d, rng)));
        CHECK(total / 200 > prev);
        prev = total / 200;
    }
}

TEST_CASE("disturbance schedule lookup", "[perception]") {
    const DisturbanceSchedule s({{1.0, 2.0, {1, 0, 0}}, {1.5, 3.0, {0, 2, 0}}});
    CHECK(s.level_at(0.5).magnitude() == 0.0);
    CHECK(s.level_at(1.0).brightness == 1.0);
    CHECK(s.level_at(1.7).brightness == 1.0);  // first listed wins
    CHECK(s.level_at(2.5).contrast == 2.0);
    CHECK(s.level_at(3.0).magnitude() == 0.0);
    CHECK_THROWS_AS(DisturbanceSchedule({{2.0, 1.0, {}}}), Error);
    CHECK_THROWS_AS(DisturbanceSchedule({{0.0, 1.0, {-1, 0, 0}}}), Error);
    CHECK(DisturbanceSchedule::constant({0, 1, 0}).level_at(1e6).contrast == 1.0);
}
