#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace spacefield;

TEST(ArrivalTime, StationaryAtTargetIsReactionTime) {
    PlayerMotionParams p;
    EXPECT_EQ(expected_arrival_time({3, 4}, {0, 0}, {3, 4}, p), 0.7);
}

TEST(ArrivalTime, StationaryThirtyFiveMetres) {
    PlayerMotionParams p;
    EXPECT_NEAR(expected_arrival_time({0, 0}, {0, 0}, {35, 0}, p), 7.7, 1e-12);
}

TEST(ArrivalTime, MovingAwayFromTarget) {
    PlayerMotionParams p;
    // 10 m from the target, running away at 5 m/s: 13.5 m left after the reaction.
    EXPECT_NEAR(expected_arrival_time({10, 0}, {5, 0}, {0, 0}, p), 3.4, 1e-12);
}

TEST(ArrivalTime, LipschitzInTarget) {
    PlayerMotionParams p;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-40, 40);
    for (int i = 0; i < 500; ++i) {
        const Vec2 pos{u(rng), u(rng)}, vel{u(rng) / 10, u(rng) / 10}, a{u(rng), u(rng)}, b{u(rng), u(rng)};
        const double d = std::abs(expected_arrival_time(pos, vel, a, p) - expected_arrival_time(pos, vel, b, p));
        EXPECT_LE(d, distance(a, b) / p.max_speed + 1e-12);
    }
}

TEST(ArrivalTime, ConstantAccelerationIsSlowerThanInstantTopSpeed) {
    PlayerMotionParams fast, accel;
    accel.model = ArrivalModel::ConstantAcceleration;
    for (double d : {0.5, 1.0, 3.0, 10.0, 40.0})
        EXPECT_GT(expected_arrival_time({0, 0}, {0, 0}, {d, 0}, accel), expected_arrival_time({0, 0}, {0, 0}, {d, 0}, fast));
    // Ramp of v^2 / 2a = 25/14 m, then cruise.
    const double ramp = 25.0 / 14.0;
    EXPECT_NEAR(expected_arrival_time({0, 0}, {0, 0}, {ramp + 5.0, 0}, accel), 0.7 + 5.0 / 7.0 + 1.0, 1e-12);
}

TEST(ArrivalTime, ParamsValidation) {
    PlayerMotionParams p;
    p.reaction_time = 2.0;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.control_rate = INFINITY;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.max_speed = 0;
    EXPECT_THROW(p.validate(), ParameterError);
    EXPECT_NO_THROW(PlayerMotionParams{}.validate());
}

TEST(ArrivalProbability, HalfAtExpectedArrival) {
    for (double tau : {0.0, 0.7, 3.3, 9.1}) EXPECT_NEAR(arrival_probability(tau, tau, 0.45), 0.5, 1e-12);
}

TEST(ArrivalProbability, SaturatesFarAfterArrival) {
    const double s = 0.45;
    EXPECT_NEAR(arrival_probability(2.0 + 20 * s, 2.0, s), 1.0, 1e-12);
    EXPECT_NEAR(arrival_probability(2.0 + 40 * s, 2.0, s), 1.0, 1e-12);
}

TEST(ArrivalProbability, ThreeQuarterPoint) {
    const double s = 0.45, tau = 1.9;
    const double T = tau + std::sqrt(3.0) * s * std::log(3.0) / M_PI;
    EXPECT_NEAR(arrival_probability(T, tau, s), 0.75, 1e-12);
}

TEST(ArrivalProbability, PointSymmetry) {
    for (double d = 0.0; d < 5.0; d += 0.37)
        EXPECT_NEAR(arrival_probability(2 + d, 2, 0.45) + arrival_probability(2 - d, 2, 0.45), 1.0, 1e-12);
}

TEST(ArrivalProbability, DerivativeMatchesCentralDifference) {
    const double h = 1e-5, s = 0.45, tau = 1.3;
    for (double T = -1.0; T < 4.0; T += 0.05) {
        const double fd = (arrival_probability(T + h, tau, s) - arrival_probability(T - h, tau, s)) / (2 * h);
        EXPECT_NEAR(arrival_probability_derivative(T, tau, s), fd, 1e-6);
    }
}

TEST(ArrivalProbability, MonotoneInTime) {
    double prev = 0.0;
    for (double T = -3.0; T < 8.0; T += 0.01) {
        const double f = arrival_probability(T, 2.0, 0.45);
        EXPECT_GE(f, prev);
        prev = f;
    }
}

TEST(ArrivalProbability, RejectsNonPositiveShape) {
    EXPECT_THROW(arrival_probability(1, 1, 0), ParameterError);
    EXPECT_THROW(arrival_probability(1, 1, -0.1), ParameterError);
}

TEST(BallFlight, ZeroDistance) { EXPECT_EQ(ball_flight_time({3, 3}, {3, 3}, 15.0), 0.0); }

TEST(BallFlight, ThirtyMetresAtFifteen) { EXPECT_NEAR(ball_flight_time({0, 0}, {18, 24}, 15.0), 2.0, 1e-12); }

TEST(BallFlight, DoublingSpeedHalvesTime) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 200; ++i) {
        const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
        EXPECT_NEAR(ball_flight_time(a, b, 24.0), ball_flight_time(a, b, 12.0) / 2, 1e-12);
    }
}

TEST(BallFlight, RejectsNonPositiveSpeed) { EXPECT_THROW(ball_flight_time({0, 0}, {1, 0}, 0.0), ParameterError); }

TEST(SportConfig, Presets) {
    const auto u = SportConfig::ultimate();
    EXPECT_DOUBLE_EQ(u.field_length, 109.73);
    EXPECT_DOUBLE_EQ(u.field_width, 48.77);
    EXPECT_EQ(u.players_per_side, 7);
    EXPECT_DOUBLE_EQ(u.ball.speed, 12.0);
    const auto s = SportConfig::soccer();
    EXPECT_DOUBLE_EQ(s.field_length, 105.0);
    EXPECT_EQ(s.players_per_side, 11);
    EXPECT_EQ(SportConfig::basketball().players_per_side, 5);
    EXPECT_NO_THROW(u.validate());
    EXPECT_EQ(parse_sport("ultimate"), Sport::Ultimate);
    EXPECT_THROW(parse_sport("curling"), ConfigError);
}

TEST(SportConfig, InvariantViolations) {
    auto c = SportConfig::ultimate();
    c.endzone_depth = 60;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SportConfig::soccer();
    c.players_per_side = 0;
    EXPECT_THROW(c.validate(), ConfigError);
}
