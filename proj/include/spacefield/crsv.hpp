#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "spacefield/errors.hpp"
#include "spacefield/game_state.hpp"
#include "spacefield/grid.hpp"
#include "spacefield/parallel.hpp"
#include "spacefield/pitch_control.hpp"

namespace spacefield {

struct WeightParams {
    // w_d = exp(-max(0, |r - disc| - free_radius) / distance_scale)
    double free_radius = 5.0;     // m
    double distance_scale = 20.0; // m
    // w_s: defenders inside a cone from the disc toward r block the lane.
    double shadow_half_angle = 0.15;  // rad
    double shadow_smoothing = 0.05;   // rad; obstruction falls linearly to 0 over this band
    std::optional<double> shadow_depth;  // m; unset = throw distance |r - disc|
    // Simultaneous-arrival region
    double meet_tolerance = 0.3;  // s
    double horizon = 4.0;         // s
    int window = 10;              // frames, moving average for the scenario value
    std::vector<int> xi_range{-20, -15, -10, -5, 0, 5, 10, 15, 20};
    double pre_initiation_seconds = 1.0;

    void validate() const {
        if (!(free_radius >= 0.0) || !(distance_scale > 0.0)) throw ParameterError("distance weight scales must be > 0");
        if (!(shadow_half_angle > 0.0) || !(shadow_smoothing >= 0.0)) throw ParameterError("shadow cone angles must be > 0");
        if (shadow_depth && !(*shadow_depth > 0.0)) throw ParameterError("shadow depth must be > 0");
        if (window < 1) throw ParameterError("window must be >= 1");
        if (std::find(xi_range.begin(), xi_range.end(), 0) == xi_range.end())
            throw ParameterError("xi range must contain 0");
    }
};

struct CrsvParams {
    PitchControlParams control;
    WeightParams weights;
    bool exclude_thrower = true;
    unsigned jobs = 1;  // scenario-level parallelism

    static CrsvParams for_sport(const SportConfig& c) {
        CrsvParams p;
        p.control = PitchControlParams::from_sport(c);
        return p;
    }
};

// Ultimate pitch control: the thrower is stationary during the stall and takes no part in the
// race; the disc leaves from the holder. With exclusion off this is plain PPCF.
inline ControlGrid uppcf_grid(const GameState& s, const GridSpec& spec, const CrsvParams& p) {
    std::optional<std::size_t> excluded;
    if (p.exclude_thrower) {
        if (!s.holder) throw InputError("frame has no identified disc holder");
        excluded = s.holder;
    }
    ControlGrid g = ppcf_grid(s, spec, p.control, excluded);
    g.model = "uppcf";
    return g;
}

inline double distance_weight(Vec2 disc, Vec2 r, const WeightParams& w) {
    return std::exp(-std::max(0.0, distance(disc, r) - w.free_radius) / w.distance_scale);
}

// Obstruction in [0, 1] of the straight lane disc -> r by the defenders.
inline double lane_obstruction(Vec2 disc, Vec2 r, const std::vector<PlayerState>& defenders, const WeightParams& w) {
    const Vec2 lane = r - disc;
    const double length = norm(lane);
    if (length == 0.0) return 0.0;
    const double depth = w.shadow_depth.value_or(length);
    double worst = 0.0;
    for (const auto& d : defenders) {
        const Vec2 u = d.position - disc;
        const double along = dot(u, lane) / length;
        if (along <= 0.0 || along > depth) continue;
        const double angle = std::atan2(std::abs(cross(lane, u)), dot(lane, u));
        double o = 0.0;
        if (angle <= w.shadow_half_angle) o = 1.0;
        else if (w.shadow_smoothing > 0.0 && angle < w.shadow_half_angle + w.shadow_smoothing)
            o = 1.0 - (angle - w.shadow_half_angle) / w.shadow_smoothing;
        worst = std::max(worst, o);
    }
    return worst;
}

inline double shadow_weight(Vec2 disc, Vec2 r, const std::vector<PlayerState>& defenders, const WeightParams& w) {
    return 1.0 - lane_obstruction(disc, r, defenders, w);
}

// Weighted Ultimate pitch control. With a receiver the attack channel holds that receiver's
// UPPCF * w_d * w_s; without one it weights the whole attacking team's UPPCF.
inline ControlGrid wuppcf_grid(const GameState& s, std::optional<std::size_t> receiver, const GridSpec& spec,
                               const CrsvParams& p) {
    p.weights.validate();
    if (receiver && *receiver >= s.attackers.size()) throw RangeError("receiver index out of range");
    const Vec2 disc = s.ball_or_throw();
    std::optional<std::size_t> excluded;
    if (p.exclude_thrower) {
        if (!s.holder) throw InputError("frame has no identified disc holder");
        excluded = s.holder;
    }
    ControlGrid g(spec, "wuppcf");
    g.frame_index = s.frame_index;
    g.params_hash = p.control.fingerprint();
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (g.masked(c)) continue;
        const Vec2 r = spec.center(c);
        const PlayerControl pc = solve_ppcf_at(s, r, p.control, excluded);
        const double base = receiver ? pc.attackers[*receiver] : pc.attack;
        g.attack[c] = base * distance_weight(disc, r, p.weights) * shadow_weight(disc, r, s.defenders, p.weights);
        g.defend[c] = pc.defend;
        if (!pc.converged) g.flags[c] |= kCellNotConverged;
    }
    return g;
}

struct ReachRegion {
    std::vector<std::size_t> cells;
    bool empty() const { return cells.empty(); }
};

// Cells where the receiver and the disc can arrive together.
inline ReachRegion reach_region(const GameState& s, std::size_t receiver, const GridSpec& spec, const CrsvParams& p) {
    if (receiver >= s.attackers.size()) throw RangeError("receiver index out of range");
    const Vec2 disc = s.ball_or_throw();
    const PlayerState& rec = s.attackers[receiver];
    ReachRegion region;
    for (std::size_t c = 0; c < spec.size(); ++c) {
        if (spec.masked(c)) continue;
        const Vec2 r = spec.center(c);
        const double tau = expected_arrival_time(rec.position, rec.velocity, r, p.control.attacker);
        const double flight = ball_flight_time(disc, r, p.control.ball);
        if (std::abs(tau - flight) <= p.weights.meet_tolerance && tau <= p.weights.horizon &&
            flight <= p.weights.horizon)
            region.cells.push_back(c);
    }
    return region;
}

// Mean receiver wUPPCF over the simultaneous-arrival region; 0 when the region is empty.
inline double v_frame(const GameState& s, std::size_t receiver, const GridSpec& spec, const CrsvParams& p) {
    const ReachRegion region = reach_region(s, receiver, spec, p);
    if (region.empty()) return 0.0;
    const Vec2 disc = s.ball_or_throw();
    std::optional<std::size_t> excluded;
    if (p.exclude_thrower) {
        if (!s.holder) throw InputError("frame has no identified disc holder");
        excluded = s.holder;
    }
    double sum = 0.0;
    for (std::size_t c : region.cells) {
        const Vec2 r = spec.center(c);
        const double base = solve_ppcf_at(s, r, p.control, excluded).attackers[receiver];
        sum += base * distance_weight(disc, r, p.weights) * shadow_weight(disc, r, s.defenders, p.weights);
    }
    return sum / static_cast<double>(region.cells.size());
}

// ---------------------------------------------------------------------------
// Counterfactual initiation timing

// A run of consecutive attack-oriented frames with the receiver's initiation frame.
struct Play {
    std::vector<GameState> frames;
    double sample_rate = 10.0;
    std::size_t initiation = 0;  // index into frames
};

struct CounterfactualPlay {
    Play play;                  // frames with the receiver's trajectory replaced
    std::size_t receiver = 0;
    int xi = 0;
    bool zero_velocity_fallback = false;  // fewer than pre_initiation_seconds before t0
};

namespace detail {

// Central differences (one-sided at the ends) for frames >= from.
inline void recompute_velocity(Play& play, std::size_t receiver, std::size_t from) {
    const double dt = 1.0 / play.sample_rate;
    const std::size_t n = play.frames.size();
    auto pos = [&](std::size_t f) { return play.frames[f].attackers[receiver].position; };
    for (std::size_t f = from; f < n; ++f) {
        Vec2 v{};
        if (n > 1) {
            if (f > 0 && f + 1 < n) v = (pos(f + 1) - pos(f - 1)) / (2.0 * dt);
            else if (f + 1 < n) v = (pos(f + 1) - pos(f)) / dt;
            else v = (pos(f) - pos(f - 1)) / dt;
        }
        play.frames[f].attackers[receiver].velocity = v;
    }
}

}  // namespace detail

// Moves the receiver's initiation from t0 to t0 + xi. Earlier: the post-initiation run is
// replayed |xi| frames sooner, translated to join the original path at t0 + xi. Later: a bridge
// continues from the t0 position at the mean velocity of the preceding second (capped at the
// attacker max speed), then the original run follows, translated to join the bridge.
// Every other player is untouched.
inline CounterfactualPlay shift_trajectory(const Play& play, std::size_t receiver, int xi, const CrsvParams& p) {
    const std::size_t n = play.frames.size();
    if (n == 0) throw RangeError("empty play");
    if (play.initiation >= n) throw RangeError("initiation frame outside the play");
    for (const auto& f : play.frames)
        if (receiver >= f.attackers.size()) throw RangeError("receiver index out of range");
    const long t0 = static_cast<long>(play.initiation);
    const long start = t0 + xi;
    if (start < 0 || start >= static_cast<long>(n))
        throw RangeError("initiation offset " + std::to_string(xi) + " moves the start outside the play");

    CounterfactualPlay cf{play, receiver, xi, false};
    cf.play.initiation = static_cast<std::size_t>(start);
    if (xi == 0) return cf;

    std::vector<Vec2> orig(n);
    for (std::size_t f = 0; f < n; ++f) orig[f] = play.frames[f].attackers[receiver].position;
    std::vector<Vec2> shifted = orig;
    const auto last = static_cast<long>(n) - 1;
    auto at = [&](long f) { return orig[static_cast<std::size_t>(std::clamp(f, 0L, last))]; };

    if (xi < 0) {
        const Vec2 correction = orig[static_cast<std::size_t>(start)] - orig[static_cast<std::size_t>(t0)];
        for (long f = start; f <= last; ++f) shifted[static_cast<std::size_t>(f)] = at(f - xi) + correction;
    } else {
        const double dt = 1.0 / play.sample_rate;
        const long lookback = std::lround(p.weights.pre_initiation_seconds * play.sample_rate);
        Vec2 v{};
        if (lookback < 1 || t0 - lookback < 0) {
            cf.zero_velocity_fallback = true;
        } else {
            v = (orig[static_cast<std::size_t>(t0)] - orig[static_cast<std::size_t>(t0 - lookback)]) /
                (static_cast<double>(lookback) * dt);
            const double speed = norm(v);
            if (speed > p.control.attacker.max_speed) v = v * (p.control.attacker.max_speed / speed);
        }
        const Vec2 origin = orig[static_cast<std::size_t>(t0)];
        for (long f = t0 + 1; f <= start; ++f)
            shifted[static_cast<std::size_t>(f)] = origin + v * (static_cast<double>(f - t0) * dt);
        const Vec2 correction = shifted[static_cast<std::size_t>(start)] - origin;
        for (long f = start + 1; f <= last; ++f) shifted[static_cast<std::size_t>(f)] = orig[static_cast<std::size_t>(f - xi)] + correction;
    }
    for (std::size_t f = 0; f < n; ++f) cf.play.frames[f].attackers[receiver].position = shifted[f];
    // Positions change strictly after min(t0, start); velocities one frame earlier see it too.
    const long first_changed = std::min(t0, start) + 1;
    detail::recompute_velocity(cf.play, receiver, static_cast<std::size_t>(std::max(0L, first_changed - 1)));
    return cf;
}

struct MovingMax {
    double value = 0.0;
    std::size_t start = 0;  // index of the first element of the best window
};

// Largest mean over windows of `w` consecutive entries.
inline MovingMax max_moving_average(const std::vector<double>& series, int w) {
    if (w < 1) throw ParameterError("window must be >= 1");
    const auto uw = static_cast<std::size_t>(w);
    if (series.size() < uw) throw RangeError("series shorter than the moving-average window");
    MovingMax best{-1.0, 0};
    for (std::size_t first = 0; first + uw <= series.size(); ++first) {
        double sum = 0.0;
        for (std::size_t k = first; k < first + uw; ++k) sum += series[k];
        const double mean = sum / static_cast<double>(uw);
        if (mean > best.value) best = {mean, first};
    }
    return best;
}

struct ScenarioValue {
    double value = 0.0;
    std::size_t argmax_frame = 0;  // play frame index where the best window starts
    std::vector<double> series;    // V_frame from the initiation frame onward
};

inline std::vector<double> v_frame_series(const Play& play, std::size_t receiver, const GridSpec& spec,
                                          const CrsvParams& p, std::size_t from) {
    std::vector<double> series(play.frames.size() - std::min(from, play.frames.size()));
    parallel_for(series.size(), p.jobs,
                 [&](std::size_t i) { series[i] = v_frame(play.frames[from + i], receiver, spec, p); });
    return series;
}

inline ScenarioValue v_scenario(const Play& play, std::size_t receiver, const GridSpec& spec, const CrsvParams& p) {
    const auto w = static_cast<std::size_t>(std::max(1, p.weights.window));
    if (play.initiation >= play.frames.size() || play.frames.size() - play.initiation < w)
        throw RangeError("fewer than " + std::to_string(w) + " frames after initiation");
    ScenarioValue sv;
    sv.series = v_frame_series(play, receiver, spec, p, play.initiation);
    const MovingMax m = max_moving_average(sv.series, p.weights.window);
    sv.value = m.value;
    sv.argmax_frame = play.initiation + m.start;
    return sv;
}

inline ScenarioValue v_scenario(const CounterfactualPlay& cf, const GridSpec& spec, const CrsvParams& p) {
    return v_scenario(cf.play, cf.receiver, spec, p);
}

struct ScenarioRecord {
    int xi = 0;
    double v_scenario = 0.0;
    std::size_t argmax_frame = 0;
    bool zero_velocity_fallback = false;
};

struct TimingResult {
    double v_timing = 0.0;
    int best_alternative = 0;
    std::vector<ScenarioRecord> scenarios;  // in xi order, valid offsets only
    std::vector<int> skipped;               // offsets that left the play range
};

// V_scenario(0) minus the best V_scenario over the nonzero offsets. Offsets that move the start
// outside the play (or leave fewer than `window` frames) are skipped and reported.
inline TimingResult v_timing(const Play& play, std::size_t receiver, const std::vector<int>& xi_range,
                             const GridSpec& spec, const CrsvParams& p) {
    std::vector<int> offsets = xi_range;
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    if (std::none_of(offsets.begin(), offsets.end(), [](int x) { return x != 0; }))
        throw ParameterError("xi range needs at least one nonzero offset");
    if (std::find(offsets.begin(), offsets.end(), 0) == offsets.end()) offsets.insert(offsets.begin(), 0);
    std::sort(offsets.begin(), offsets.end());

    const auto w = static_cast<long>(std::max(1, p.weights.window));
    std::vector<std::optional<ScenarioRecord>> records(offsets.size());
    CrsvParams inner = p;
    inner.jobs = 1;
    parallel_for(offsets.size(), p.jobs, [&](std::size_t i) {
        const int xi = offsets[i];
        const long start = static_cast<long>(play.initiation) + xi;
        if (start < 0 || start + w > static_cast<long>(play.frames.size())) return;
        const CounterfactualPlay cf = shift_trajectory(play, receiver, xi, inner);
        const ScenarioValue sv = v_scenario(cf, spec, inner);
        records[i] = ScenarioRecord{xi, sv.value, sv.argmax_frame, cf.zero_velocity_fallback};
    });

    TimingResult result;
    std::optional<double> actual, best;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (!records[i]) {
            result.skipped.push_back(offsets[i]);
            continue;
        }
        result.scenarios.push_back(*records[i]);
        if (offsets[i] == 0) actual = records[i]->v_scenario;
        else if (!best || records[i]->v_scenario > *best) {
            best = records[i]->v_scenario;
            result.best_alternative = offsets[i];
        }
    }
    if (!actual) throw RangeError("the actual play has fewer than window frames after initiation");
    if (!best) throw RangeError("no nonzero initiation offset fits inside the play");
    result.v_timing = *actual - *best;
    return result;
}

}  // namespace spacefield
