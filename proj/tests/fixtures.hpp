#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spacefield/spacefield.hpp"

namespace fixtures {

using namespace spacefield;

inline PlayerState player(Team t, int i, Vec2 p, Vec2 v = {}) { return {PlayerRef{t, i}, p, v}; }

// Random in-play state: k per side anywhere on the field, modest velocities, ball at an attacker.
inline GameState random_state(std::mt19937_64& rng, const SportConfig& c, int k) {
    std::uniform_real_distribution<double> ux(-c.half_length(), c.half_length()), uy(-c.half_width(), c.half_width()),
        uv(-3.0, 3.0);
    GameState s;
    for (int i = 0; i < k; ++i) s.attackers.push_back(player(Team::Home, i, {ux(rng), uy(rng)}, {uv(rng), uv(rng)}));
    for (int i = 0; i < k; ++i) s.defenders.push_back(player(Team::Away, i, {ux(rng), uy(rng)}, {uv(rng), uv(rng)}));
    const auto h = std::uniform_int_distribution<int>(0, k - 1)(rng);
    s.holder = static_cast<std::size_t>(h);
    s.ball = s.attackers[static_cast<std::size_t>(h)].position;
    return s;
}

// Classical RK4 on the race ODE with fixed arrival times, written independently of the library.
// Returns each player's probability (attackers first) at t_max.
inline std::vector<double> rk4_race(const std::vector<double>& tau, const std::vector<double>& lambda, double s,
                                    double t_flight, double t_max, double h) {
    const std::size_t n = tau.size();
    const double k = M_PI / (std::sqrt(3.0) * s);
    auto rhs = [&](double t, const std::vector<double>& p) {
        double sum = 0.0;
        for (double v : p) sum += v;
        std::vector<double> d(n);
        for (std::size_t j = 0; j < n; ++j) d[j] = (1.0 - sum) * lambda[j] / (1.0 + std::exp(-k * (t - tau[j])));
        return d;
    };
    std::vector<double> p(n, 0.0), tmp(n);
    double t = t_flight;
    while (t < t_max - 1e-12) {
        const double step = std::min(h, t_max - t);
        const auto k1 = rhs(t, p);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = p[j] + 0.5 * step * k1[j];
        const auto k2 = rhs(t + 0.5 * step, tmp);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = p[j] + 0.5 * step * k2[j];
        const auto k3 = rhs(t + 0.5 * step, tmp);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = p[j] + step * k3[j];
        const auto k4 = rhs(t + step, tmp);
        for (std::size_t j = 0; j < n; ++j) p[j] += step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        t += step;
    }
    return p;
}

// Oracle arrival time under the reaction-then-max-speed model, from scratch.
inline double oracle_tau(Vec2 p, Vec2 v, Vec2 target, double reaction, double vmax) {
    const double x = p.x + v.x * reaction, y = p.y + v.y * reaction;
    return reaction + std::hypot(target.x - x, target.y - y) / vmax;
}

// ---------------------------------------------------------------------------
// Synthetic match in the tracking/event CSV formats.

struct SyntheticMatch {
    TrackingTable home;
    TrackingTable away;
    std::vector<EventRecord> events;
};

// `frames` frames at the config sample rate in period 1. Home holds the ball throughout: Home_1
// carries it for the first half, passes to Home_2, who holds it for the rest.
inline SyntheticMatch synthetic_match(const SportConfig& c, int frames, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-0.4 * c.field_length, 0.4 * c.field_length),
        uy(-0.4 * c.field_width, 0.4 * c.field_width), step(-0.2, 0.2);
    const int k = c.players_per_side;
    SyntheticMatch m;
    m.home = {Team::Home, k, {}};
    m.away = {Team::Away, k, {}};
    std::vector<Vec2> hp(static_cast<std::size_t>(k)), ap(static_cast<std::size_t>(k));
    for (auto& p : hp) p = {ux(rng), uy(rng)};
    for (auto& p : ap) p = {ux(rng), uy(rng)};
    const int pass_start = frames / 2, pass_end = frames / 2 + 5;
    for (int f = 0; f < frames; ++f) {
        TrackingRow h{1, f / c.sample_rate, {}, std::nullopt}, a{1, f / c.sample_rate, {}, std::nullopt};
        for (auto& p : hp) {
            p = p + Vec2{step(rng), step(rng)};
            h.players.emplace_back(p);
        }
        for (auto& p : ap) {
            p = p + Vec2{step(rng), step(rng)};
            a.players.emplace_back(p);
        }
        m.home.rows.push_back(h);
        m.away.rows.push_back(a);
    }
    auto pos = [&](int f, int i) { return *m.home.rows[static_cast<std::size_t>(f)].players[static_cast<std::size_t>(i)]; };
    EventRecord hold1;
    hold1.team = Team::Home;
    hold1.type = "POSSESSION";
    hold1.start_frame = 0;
    hold1.end_frame = pass_start;
    hold1.start_time = 0.0;
    hold1.end_time = pass_start / c.sample_rate;
    hold1.from = "Home_1";
    EventRecord pass;
    pass.team = Team::Home;
    pass.type = "PASS";
    pass.start_frame = pass_start;
    pass.end_frame = pass_end;
    pass.start_time = pass_start / c.sample_rate;
    pass.end_time = pass_end / c.sample_rate;
    pass.from = "Home_1";
    pass.to = "Home_2";
    pass.start_x = pos(pass_start, 0).x;
    pass.start_y = pos(pass_start, 0).y;
    pass.end_x = pos(pass_end, 1).x;
    pass.end_y = pos(pass_end, 1).y;
    EventRecord hold2 = hold1;
    hold2.start_frame = pass_end;
    hold2.end_frame = frames - 1;
    hold2.start_time = pass_end / c.sample_rate;
    hold2.end_time = (frames - 1) / c.sample_rate;
    hold2.from = "Home_2";
    m.events = {hold1, pass, hold2};
    return m;
}

inline void write_match(const SyntheticMatch& m, const std::filesystem::path& events, const std::filesystem::path& home,
                        const std::filesystem::path& away) {
    std::ofstream e(events), h(home), a(away);
    write_events(e, m.events);
    write_tracking(h, m.home);
    write_tracking(a, m.away);
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

// ---------------------------------------------------------------------------
// Scripted Ultimate possession for timing analysis, already oriented toward +x at 10 Hz.
//
// The thrower holds the disc at (-20, 0). The receiver (attacker 1) stands at (-10, 0) and
// cuts along +x at 4.5 m/s from frame t0. Two defenders stand in the throwing lane at
// (-13, +-1) until frame t_open, then leave toward the sidelines at `exit_step` m per frame.
// A marker closes from (-10, -10) on the receiver's starting spot from frame t_help onward. The remaining
// players stand far from the action.
struct ScriptedPossession {
    Play play;
    std::size_t receiver = 1;
    int t0 = 20;
    int t_open = 30;
};

// Lane opens 1 s after the cut starts; help arrives late.
struct LaneScript {
    int t_open = 30;
    int t_help = 45;
    double exit_step = 0.5;
};

// The lane opens exactly when the cut starts and help arrives soon after.
inline LaneScript open_at_initiation() { return {20, 20, 21.0}; }

inline ScriptedPossession scripted_possession(LaneScript script = {}, int frames = 90, int t0 = 20) {
    const int t_open = script.t_open, t_help = script.t_help;
    ScriptedPossession sp;
    sp.t0 = t0;
    sp.t_open = t_open;
    sp.play.sample_rate = 10.0;
    sp.play.initiation = static_cast<std::size_t>(t0);
    for (int f = 0; f < frames; ++f) {
        GameState s;
        s.frame_index = static_cast<std::size_t>(f);
        s.time = f / 10.0;
        s.attackers.push_back(player(Team::Home, 0, {-20.0, 0.0}));
        const double run = f > t0 ? 0.45 * (f - t0) : 0.0;
        s.attackers.push_back(player(Team::Home, 1, {-10.0 + run, 0.0}));
        for (int i = 2; i < 7; ++i) s.attackers.push_back(player(Team::Home, i, {-30.0 + 10.0 * i, 21.0}));
        const double spread = f > t_open ? std::min(22.0, 1.0 + script.exit_step * (f - t_open)) : 1.0;
        s.defenders.push_back(player(Team::Away, 0, {-13.0, spread}));
        s.defenders.push_back(player(Team::Away, 1, {-13.0, -spread}));
        const double help = f > t_help ? std::min(8.5, 0.5 * (f - t_help)) : 0.0;
        s.defenders.push_back(player(Team::Away, 2, {-10.0, -10.0 + help}));
        for (int i = 3; i < 7; ++i) s.defenders.push_back(player(Team::Away, i, {-40.0 + 10.0 * i, -21.0}));
        s.ball = Vec2{-20.0, 0.0};
        s.holder = 0;
        sp.play.frames.push_back(std::move(s));
    }
    // Finite-difference velocities for every player.
    for (std::size_t f = 0; f < sp.play.frames.size(); ++f) {
        auto vel = [&](auto member, std::size_t i) {
            const auto a = f > 0 ? f - 1 : f, b = f + 1 < sp.play.frames.size() ? f + 1 : f;
            const Vec2 d = (sp.play.frames[b].*member)[i].position - (sp.play.frames[a].*member)[i].position;
            return d / (static_cast<double>(b - a) / 10.0);
        };
        for (std::size_t i = 0; i < 7; ++i) {
            sp.play.frames[f].attackers[i].velocity = vel(&GameState::attackers, i);
            sp.play.frames[f].defenders[i].velocity = vel(&GameState::defenders, i);
        }
    }
    return sp;
}

}  // namespace fixtures
