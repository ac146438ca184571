#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spacefield/csv.hpp"
#include "spacefield/errors.hpp"
#include "spacefield/game_state.hpp"
#include "spacefield/grid.hpp"
#include "spacefield/hash.hpp"
#include "spacefield/kinematics.hpp"
#include "spacefield/sport.hpp"

namespace spacefield {

enum class Stepper {
    // P += (1 - S) f(T) lambda dT, with the step scaled down if it would push S past 1.
    Euler,
    // f sampled at the step midpoint and held fixed, then the step solved exactly:
    // S -> 1 - (1 - S) exp(-sum(f lambda) dT), shared in proportion to f lambda.
    // Second order in dT and never overshoots S = 1.
    Exponential,
};

// Which players' accumulated control blocks player j. With Opponents the two team totals are
// each at most 1 but their sum is not.
enum class Interference { AllPlayers, Opponents };

struct IntegrationParams {
    double dt = 0.04;          // s
    double t_max = 10.0;       // s, absolute horizon measured from the frame time
    double convergence = 0.9999;  // stop once total control exceeds this
    Stepper stepper = Stepper::Exponential;

    void validate() const {
        if (!(dt > 0.0)) throw ParameterError("integration dt must be > 0");
        if (!(t_max > 0.0)) throw ParameterError("integration t_max must be > 0");
    }
};

struct PitchControlParams {
    PlayerMotionParams attacker;
    PlayerMotionParams defender;
    BallModel ball;
    IntegrationParams integration;
    Interference interference = Interference::AllPlayers;

    // Defaults from the sport config; defender control rate = attacker rate * defender_rate_factor.
    static PitchControlParams from_sport(const SportConfig& c, double defender_rate_factor = 1.0) {
        PitchControlParams p;
        p.attacker = c.attacker;
        p.defender = c.defender;
        p.defender.control_rate = c.attacker.control_rate * defender_rate_factor;
        p.ball = c.ball;
        return p;
    }

    void validate() const {
        attacker.validate();
        defender.validate();
        ball.validate();
        integration.validate();
    }

    std::string fingerprint() const {
        std::ostringstream o;
        auto m = [&](const PlayerMotionParams& q) {
            o << csv::format_double(q.reaction_time) << ',' << csv::format_double(q.max_speed) << ','
              << csv::format_double(q.max_acceleration) << ',' << csv::format_double(q.arrival_uncertainty) << ','
              << csv::format_double(q.control_rate) << ',' << static_cast<int>(q.model) << ';';
        };
        m(attacker);
        m(defender);
        o << csv::format_double(ball.speed) << ',' << csv::format_double(ball.dribble_speed) << ';'
          << csv::format_double(integration.dt) << ',' << csv::format_double(integration.t_max) << ','
          << csv::format_double(integration.convergence) << ',' << static_cast<int>(integration.stepper) << ','
          << static_cast<int>(interference);
        return hex64(fnv1a64(o.str()));
    }
};

// Per-player accumulated control at one target.
struct PlayerControl {
    std::vector<double> attackers;
    std::vector<double> defenders;
    double attack = 0.0;
    double defend = 0.0;
    bool converged = true;

    double total() const { return attack + defend; }
};

struct RacePlayer {
    bool attacker = true;
    bool active = true;
    double rate = 0.0;   // lambda
    double scale = 0.0;  // pi / (sqrt(3) s)
};

namespace detail {

inline std::vector<RacePlayer> race_players(const GameState& s, const PitchControlParams& p,
                                            std::optional<std::size_t> excluded_attacker) {
    std::vector<RacePlayer> out;
    out.reserve(s.attackers.size() + s.defenders.size());
    const double sa = std::numbers::pi / (std::numbers::sqrt3 * p.attacker.arrival_uncertainty);
    const double sd = std::numbers::pi / (std::numbers::sqrt3 * p.defender.arrival_uncertainty);
    for (std::size_t j = 0; j < s.attackers.size(); ++j)
        out.push_back({true, !(excluded_attacker && *excluded_attacker == j), p.attacker.control_rate, sa});
    for (std::size_t j = 0; j < s.defenders.size(); ++j)
        out.push_back({false, true, p.defender.control_rate, sd});
    return out;
}

// Integrates dP_j/dT = (1 - sum_k P_k) f_j(T) lambda_j from T0 to T1 in steps of at most dt.
// tau(j, T) gives player j's expected arrival time at the (possibly moving) target at time T.
// `probs` is filled with each player's accumulated control (index order of `players`).
template <typename Tau>
double integrate_race(const std::vector<RacePlayer>& players, double t0, double t1, const IntegrationParams& ip,
                      Interference interference, Tau&& tau, std::vector<double>& probs, bool stop_early = true) {
    const std::size_t n = players.size();
    probs.assign(n, 0.0);
    std::vector<double> rates(n, 0.0);
    double total = 0.0, total_att = 0.0, total_def = 0.0;
    const double span = t1 - t0;
    const auto steps = span > 0.0 ? static_cast<long>(std::ceil(span / ip.dt - 1e-9)) : 0L;
    for (long k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * ip.dt;
        const double h = std::min(ip.dt, t1 - t);
        // The exponential stepper samples arrival probabilities at the step midpoint.
        const double te = ip.stepper == Stepper::Exponential ? t + 0.5 * h : t;
        double rate_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const RacePlayer& pl = players[j];
            if (!pl.active) {
                rates[j] = 0.0;
                continue;
            }
            const double f = 1.0 / (1.0 + std::exp(-pl.scale * (te - tau(j, te))));
            rates[j] = f * pl.rate;
            rate_sum += rates[j];
        }
        if (interference == Interference::AllPlayers) {
            const double room = 1.0 - total;
            double gain_factor;
            if (ip.stepper == Stepper::Exponential) {
                gain_factor = rate_sum > 0.0 ? room * -std::expm1(-rate_sum * h) / rate_sum : 0.0;
            } else {
                gain_factor = room * h;
                if (rate_sum * h > 1.0) gain_factor = room / rate_sum;
            }
            for (std::size_t j = 0; j < n; ++j) probs[j] += rates[j] * gain_factor;
        } else {
            // Each player is blocked only by the opposing side's accumulated control.
            double att_gain = 0.0, def_gain = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (players[j].attacker) att_gain += rates[j];
                else def_gain += rates[j];
            }
            auto factor = [&](double room, double side_rate) {
                if (ip.stepper == Stepper::Exponential)
                    return side_rate > 0.0 ? room * -std::expm1(-side_rate * h) / side_rate : 0.0;
                return side_rate * h > 1.0 ? room / side_rate : room * h;
            };
            const double fa = factor(1.0 - total_def, att_gain);
            const double fd = factor(1.0 - total_att, def_gain);
            for (std::size_t j = 0; j < n; ++j) probs[j] += rates[j] * (players[j].attacker ? fa : fd);
        }
        total = total_att = total_def = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            total += probs[j];
            (players[j].attacker ? total_att : total_def) += probs[j];
        }
        if (stop_early && total > ip.convergence) break;
    }
    return total;
}

inline PlayerControl split_control(const std::vector<RacePlayer>& players, const std::vector<double>& probs,
                                   std::size_t n_att) {
    PlayerControl pc;
    pc.attackers.assign(probs.begin(), probs.begin() + static_cast<std::ptrdiff_t>(n_att));
    pc.defenders.assign(probs.begin() + static_cast<std::ptrdiff_t>(n_att), probs.end());
    for (std::size_t j = 0; j < players.size(); ++j) (players[j].attacker ? pc.attack : pc.defend) += probs[j];
    return pc;
}

}  // namespace detail

// Control probabilities of every player at a fixed target. Control accumulates only after the
// ball can arrive there (T >= T_flight); arrival times are measured from the frame time.
inline PlayerControl solve_ppcf_at(const GameState& s, Vec2 target, const PitchControlParams& p,
                                   std::optional<std::size_t> excluded_attacker = std::nullopt) {
    const Vec2 ball = s.ball_or_throw();
    const auto players = detail::race_players(s, p, excluded_attacker);
    std::vector<double> tau(players.size());
    for (std::size_t j = 0; j < s.attackers.size(); ++j)
        tau[j] = expected_arrival_time(s.attackers[j].position, s.attackers[j].velocity, target, p.attacker);
    for (std::size_t j = 0; j < s.defenders.size(); ++j)
        tau[s.attackers.size() + j] =
            expected_arrival_time(s.defenders[j].position, s.defenders[j].velocity, target, p.defender);
    const double t_flight = ball_flight_time(ball, target, p.ball);
    std::vector<double> probs;
    const double total = detail::integrate_race(
        players, t_flight, p.integration.t_max, p.integration, p.interference,
        [&](std::size_t j, double) { return tau[j]; }, probs);
    PlayerControl pc = detail::split_control(players, probs, s.attackers.size());
    pc.converged = total >= 0.99;
    return pc;
}

// Attacker and defender control summed over each team at every unmasked cell center.
inline ControlGrid ppcf_grid(const GameState& s, const GridSpec& spec, const PitchControlParams& p,
                             std::optional<std::size_t> excluded_attacker = std::nullopt) {
    p.validate();
    spec.validate();
    s.ball_or_throw();
    ControlGrid g(spec, "ppcf");
    g.frame_index = s.frame_index;
    g.params_hash = p.fingerprint();
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (g.masked(c)) continue;
        const PlayerControl pc = solve_ppcf_at(s, spec.center(c), p, excluded_attacker);
        g.attack[c] = pc.attack;
        g.defend[c] = pc.defend;
        if (!pc.converged) g.flags[c] |= kCellNotConverged;
    }
    return g;
}

// Control of one attacker (index into s.attackers) at every unmasked cell.
inline std::vector<double> ppcf_player_grid(const GameState& s, const GridSpec& spec, const PitchControlParams& p,
                                            std::size_t attacker,
                                            std::optional<std::size_t> excluded_attacker = std::nullopt) {
    if (attacker >= s.attackers.size()) throw RangeError("attacker index out of range");
    std::vector<double> out(spec.size(), 0.0);
    for (std::size_t c = 0; c < spec.size(); ++c) {
        if (spec.masked(c)) continue;
        out[c] = solve_ppcf_at(s, spec.center(c), p, excluded_attacker).attackers[attacker];
    }
    return out;
}

}  // namespace spacefield
