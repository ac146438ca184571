#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "spacefield/errors.hpp"
#include "spacefield/game_state.hpp"
#include "spacefield/grid.hpp"
#include "spacefield/obso.hpp"
#include "spacefield/pitch_control.hpp"

namespace spacefield {

enum class Delivery { Pass, Dribble };
enum class DribbleAttackers { CarrierOnly, AllAttackers };
enum class BimosCombine { Mix, Max };

struct PbcfParams {
    PitchControlParams control;  // control.ball.speed = pass speed, control.ball.dribble_speed = dribble speed
    DribbleAttackers dribble_attackers = DribbleAttackers::CarrierOnly;
    double dribble_radius = 15.0;  // m from the carrier; farther dribble targets score 0
    bool exclude_passer = true;
    BimosCombine combine = BimosCombine::Mix;
    double pass_weight = 0.8;
    double dribble_weight = 0.2;

    static PbcfParams for_sport(const SportConfig& c) {
        PbcfParams p;
        p.control = PitchControlParams::from_sport(c);
        return p;
    }

    void validate() const {
        control.validate();
        if (!(dribble_radius > 0.0)) throw ParameterError("dribble radius must be > 0");
        if (combine == BimosCombine::Mix) {
            if (pass_weight < 0.0 || dribble_weight < 0.0 || std::abs(pass_weight + dribble_weight - 1.0) > 1e-9)
                throw ParameterError("pass/dribble weights must be >= 0 and sum to 1");
        }
    }
};

struct PbcfResult {
    double attack = 0.0;
    double defend = 0.0;
    bool degenerate = false;  // zero-length delivery
    bool out_of_range = false;  // dribble target beyond dribble_radius
};

namespace detail {

inline std::optional<std::size_t> ball_carrier(const GameState& s) {
    if (s.holder) return s.holder;
    if (!s.ball || s.attackers.empty()) return std::nullopt;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.attackers.size(); ++j) {
        const double d = distance(s.attackers[j].position, *s.ball);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

}  // namespace detail

// Control of a delivery from the ball to `target`: the race runs over 0 <= T <= T_flight with
// every player chasing the ball's position at time T along the straight constant-speed path.
inline PbcfResult pbcf_at(const GameState& s, Vec2 target, const PbcfParams& p, Delivery mode = Delivery::Pass) {
    const Vec2 ball = s.ball_or_throw();
    const double speed = mode == Delivery::Pass ? p.control.ball.speed : p.control.ball.dribble_speed;
    const double flight = ball_flight_time(ball, target, speed);
    PbcfResult r;
    if (flight == 0.0) {
        r.degenerate = true;
        return r;
    }

    auto players = detail::race_players(s, p.control, std::nullopt);
    const auto carrier = detail::ball_carrier(s);
    if (mode == Delivery::Pass) {
        if (p.exclude_passer && s.holder) players[*s.holder].active = false;
    } else {
        if (carrier && distance(s.attackers[*carrier].position, target) > p.dribble_radius) {
            r.out_of_range = true;
            return r;
        }
        if (p.dribble_attackers == DribbleAttackers::CarrierOnly)
            for (std::size_t j = 0; j < s.attackers.size(); ++j) players[j].active = carrier && j == *carrier;
    }

    const std::size_t n_att = s.attackers.size();
    auto tau = [&](std::size_t j, double T) {
        const Vec2 at = lerp(ball, target, std::min(1.0, T / flight));
        if (j < n_att) return expected_arrival_time(s.attackers[j].position, s.attackers[j].velocity, at, p.control.attacker);
        const auto& d = s.defenders[j - n_att];
        return expected_arrival_time(d.position, d.velocity, at, p.control.defender);
    };
    std::vector<double> probs;
    detail::integrate_race(players, 0.0, flight, p.control.integration, p.control.interference, tau, probs);
    for (std::size_t j = 0; j < players.size(); ++j) (players[j].attacker ? r.attack : r.defend) += probs[j];
    return r;
}

inline ControlGrid pbcf_surface(const GameState& s, const GridSpec& spec, const PbcfParams& p,
                                Delivery mode = Delivery::Pass) {
    p.validate();
    spec.validate();
    s.ball_or_throw();
    ControlGrid g(spec, mode == Delivery::Pass ? "pbcf" : "pbcf_dribble");
    g.frame_index = s.frame_index;
    g.params_hash = p.control.fingerprint();
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (g.masked(c)) continue;
        const PbcfResult r = pbcf_at(s, spec.center(c), p, mode);
        g.attack[c] = r.attack;
        g.defend[c] = r.defend;
        if (r.degenerate) g.flags[c] |= kCellDegenerate;
    }
    return g;
}

struct BimosResult {
    ControlGrid field;               // attack channel = combined per-cell BIMOS
    std::vector<double> pass;        // score * PBCF_pass
    std::vector<double> dribble;     // score * PBCF_dribble
    double total = 0.0;              // mean over unmasked cells
};

// Combines per-cell pass and dribble components by weighted sum or by maximum.
inline BimosResult combine_bimos(std::vector<double> pass, std::vector<double> dribble, const GridSpec& spec,
                                 const PbcfParams& p) {
    if (pass.size() != spec.size() || dribble.size() != spec.size())
        throw GeometryError("component sizes do not match the grid");
    BimosResult r{ControlGrid(spec, "bimos"), std::move(pass), std::move(dribble), 0.0};
    std::size_t cells = 0;
    for (std::size_t c = 0; c < spec.size(); ++c) {
        if (spec.masked(c)) continue;
        r.field.attack[c] = p.combine == BimosCombine::Max ? std::max(r.pass[c], r.dribble[c])
                                                           : p.pass_weight * r.pass[c] + p.dribble_weight * r.dribble[c];
        r.total += r.field.attack[c];
        ++cells;
    }
    if (cells > 0) r.total /= static_cast<double>(cells);
    return r;
}

inline BimosResult bimos_surface(const GameState& s, const GridSpec& spec, const SportConfig& c, const PbcfParams& p,
                                 const ScoreParams& score_params) {
    p.validate();
    const ScoreSurface score = score_surface(c, spec, score_params, s.attack_direction);
    const ControlGrid pass = pbcf_surface(s, spec, p, Delivery::Pass);
    const ControlGrid dribble = pbcf_surface(s, spec, p, Delivery::Dribble);
    std::vector<double> pv(spec.size(), 0.0), dv(spec.size(), 0.0);
    for (std::size_t cell = 0; cell < spec.size(); ++cell) {
        pv[cell] = score.values[cell] * pass.attack[cell];
        dv[cell] = score.values[cell] * dribble.attack[cell];
    }
    BimosResult r = combine_bimos(std::move(pv), std::move(dv), spec, p);
    r.field.frame_index = s.frame_index;
    r.field.params_hash = p.control.fingerprint();
    r.field.flags = pass.flags;
    return r;
}

}  // namespace spacefield
