#pragma once

#include <cmath>
#include <numbers>

#include "spacefield/errors.hpp"
#include "spacefield/geometry.hpp"

namespace spacefield {

enum class ArrivalModel {
    // Continue at current velocity for the reaction time, then run straight at max speed.
    ReactionThenMaxSpeed,
    // Same reaction phase, then accelerate from rest up to max speed.
    ConstantAcceleration,
};

struct PlayerMotionParams {
    double reaction_time = 0.7;      // s
    double max_speed = 5.0;          // m/s
    double max_acceleration = 7.0;   // m/s^2, only used by ArrivalModel::ConstantAcceleration
    double arrival_uncertainty = 0.45;  // s, logistic shape
    double control_rate = 4.3;       // 1/s
    ArrivalModel model = ArrivalModel::ReactionThenMaxSpeed;

    void validate() const {
        if (!(reaction_time > 0.0) || !(reaction_time < 2.0))
            throw ParameterError("reaction_time must lie in (0, 2) s");
        if (!(max_speed > 0.0)) throw ParameterError("max_speed must be > 0");
        if (!(max_acceleration > 0.0)) throw ParameterError("max_acceleration must be > 0");
        if (!(arrival_uncertainty > 0.0)) throw ParameterError("arrival_uncertainty must be > 0");
        if (!(control_rate > 0.0) || !std::isfinite(control_rate))
            throw ParameterError("control_rate must be positive and finite");
    }
};

struct BallModel {
    double speed = 15.0;          // m/s, straight line
    double dribble_speed = 7.0;   // m/s

    void validate() const {
        if (!(speed > 0.0)) throw ParameterError("ball speed must be > 0");
        if (!(dribble_speed > 0.0)) throw ParameterError("dribble speed must be > 0");
    }
};

// Time for a player at `position` moving with `velocity` to reach `target`.
inline double expected_arrival_time(Vec2 position, Vec2 velocity, Vec2 target,
                                    const PlayerMotionParams& params) {
    const Vec2 after_reaction = position + velocity * params.reaction_time;
    const double remaining = distance(after_reaction, target);
    if (params.model == ArrivalModel::ConstantAcceleration) {
        const double ramp = params.max_speed * params.max_speed / (2.0 * params.max_acceleration);
        if (remaining <= ramp)
            return params.reaction_time + std::sqrt(2.0 * remaining / params.max_acceleration);
        return params.reaction_time + params.max_speed / params.max_acceleration +
               (remaining - ramp) / params.max_speed;
    }
    return params.reaction_time + remaining / params.max_speed;
}

namespace detail {
inline double logistic_scale(double s) { return std::numbers::pi / (std::numbers::sqrt3 * s); }
}  // namespace detail

// Probability the player has arrived by time T given expected arrival tau (logistic, shape s).
inline double arrival_probability(double T, double tau, double s) {
    if (!(s > 0.0)) throw ParameterError("arrival uncertainty s must be > 0");
    return 1.0 / (1.0 + std::exp(-detail::logistic_scale(s) * (T - tau)));
}

// d/dT of arrival_probability.
inline double arrival_probability_derivative(double T, double tau, double s) {
    const double f = arrival_probability(T, tau, s);
    return detail::logistic_scale(s) * f * (1.0 - f);
}

inline double ball_flight_time(Vec2 origin, Vec2 target, double speed) {
    if (!(speed > 0.0)) throw ParameterError("ball speed must be > 0");
    return distance(origin, target) / speed;
}

inline double ball_flight_time(Vec2 origin, Vec2 target, const BallModel& ball) {
    return ball_flight_time(origin, target, ball.speed);
}

}  // namespace spacefield
