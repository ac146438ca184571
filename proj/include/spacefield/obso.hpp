#pragma once

#include <cmath>
#include <vector>

#include "spacefield/errors.hpp"
#include "spacefield/game_state.hpp"
#include "spacefield/grid.hpp"
#include "spacefield/pitch_control.hpp"
#include "spacefield/sport.hpp"

namespace spacefield {

// Fixed parametric scoring surface. Soccer and basketball use a logistic in the distance to
// the goal/basket center; Ultimate scores 1 inside the attacking end zone and decays outside.
struct ScoreParams {
    double midpoint = 18.0;     // d0, m
    double steepness = 4.0;     // beta, m
    double endzone_decay = 25.0;  // sigma_G, m (Ultimate)

    static ScoreParams for_sport(Sport s) {
        ScoreParams p;
        if (s == Sport::Basketball) {
            p.midpoint = 6.75;
            p.steepness = 1.5;
        }
        return p;
    }
};

struct ObsoParams {
    PitchControlParams control;
    ScoreParams score;
    double transition_sigma = 14.0;  // m, exponential distance kernel around the ball

    static ObsoParams for_sport(const SportConfig& c) {
        ObsoParams p;
        p.control = PitchControlParams::from_sport(c);
        p.score = ScoreParams::for_sport(c.sport);
        p.transition_sigma = c.sport == Sport::Ultimate ? 18.0 : 14.0;
        return p;
    }
};

struct ScoreSurface {
    GridSpec spec;
    std::vector<double> values;
};

struct TransitionSurface {
    GridSpec spec;
    std::vector<double> values;  // sums to 1 over unmasked cells
    double normalization = 0.0;  // sum of the unnormalized density
};

// P(score | r) at a point for an attack toward `direction` * x.
inline double score_probability(Vec2 r, const SportConfig& c, const ScoreParams& p, int direction = +1) {
    const double x = r.x * direction;
    if (c.sport == Sport::Ultimate) {
        const double front = c.half_length() - c.endzone_depth;
        if (x >= front) return 1.0;
        return std::exp(-(front - x) / p.endzone_decay);
    }
    const double goal_x = c.half_length() - c.target_inset;
    const double d = std::hypot(x - goal_x, r.y);
    return 1.0 / (1.0 + std::exp((d - p.midpoint) / p.steepness));
}

inline ScoreSurface score_surface(const SportConfig& c, const GridSpec& spec, const ScoreParams& p,
                                  int direction = +1) {
    ScoreSurface s{spec, std::vector<double>(spec.size(), 0.0)};
    for (std::size_t cell = 0; cell < spec.size(); ++cell)
        if (!spec.masked(cell)) s.values[cell] = score_probability(spec.center(cell), c, p, direction);
    return s;
}

// exp(-|ball - r| / sigma) * attacker_control(r), normalized over unmasked cells.
inline TransitionSurface transition_surface(const GameState& s, const ControlGrid& control, double sigma) {
    const Vec2 ball = s.ball_or_throw();
    if (!(sigma > 0.0)) throw ParameterError("transition sigma must be > 0");
    TransitionSurface t{control.spec, std::vector<double>(control.size(), 0.0), 0.0};
    for (std::size_t c = 0; c < control.size(); ++c) {
        if (control.masked(c)) continue;
        t.values[c] = std::exp(-distance(ball, control.spec.center(c)) / sigma) * control.attack[c];
        t.normalization += t.values[c];
    }
    if (!(t.normalization > 0.0)) throw InputError("degenerate frame: transition density is zero everywhere");
    for (double& v : t.values) v /= t.normalization;
    return t;
}

inline TransitionSurface transition_surface(const GameState& s, const GridSpec& spec, const ObsoParams& p) {
    return transition_surface(s, ppcf_grid(s, spec, p.control), p.transition_sigma);
}

struct ObsoResult {
    ControlGrid field;  // attack channel = per-cell OBSO, defend channel unused (0)
    double total = 0.0;
};

// Per-cell score * control * transition and its sum.
inline ObsoResult compose_obso(const std::vector<double>& score, const std::vector<double>& control,
                               const std::vector<double>& transition, const GridSpec& spec) {
    if (score.size() != spec.size() || control.size() != spec.size() || transition.size() != spec.size())
        throw GeometryError("surface sizes do not match the grid");
    ObsoResult r{ControlGrid(spec, "obso"), 0.0};
    for (std::size_t c = 0; c < spec.size(); ++c) {
        if (spec.masked(c)) continue;
        r.field.attack[c] = score[c] * control[c] * transition[c];
        r.total += r.field.attack[c];
    }
    return r;
}

inline ObsoResult obso_surface(const GameState& s, const GridSpec& spec, const SportConfig& c, const ObsoParams& p) {
    const ControlGrid control = ppcf_grid(s, spec, p.control);
    const TransitionSurface transition = transition_surface(s, control, p.transition_sigma);
    const ScoreSurface score = score_surface(c, spec, p.score, s.attack_direction);
    ObsoResult r = compose_obso(score.values, control.attack, transition.values, spec);
    r.field.frame_index = s.frame_index;
    r.field.params_hash = p.control.fingerprint();
    r.field.flags = control.flags;
    return r;
}

}  // namespace spacefield
