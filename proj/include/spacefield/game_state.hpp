#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "spacefield/errors.hpp"
#include "spacefield/geometry.hpp"
#include "spacefield/space_data.hpp"

namespace spacefield {

struct PlayerState {
    PlayerRef id;
    Vec2 position;
    Vec2 velocity;
};

// Instantaneous game state seen from the attacking team. All models consume this.
struct GameState {
    std::vector<PlayerState> attackers;
    std::vector<PlayerState> defenders;
    std::optional<Vec2> ball;
    std::optional<std::size_t> holder;  // index into attackers
    double time = 0.0;
    std::size_t frame_index = 0;
    int attack_direction = +1;  // +1: attacking the +x target

    const Vec2& ball_or_throw() const {
        if (!ball) throw InputError("frame has no ball position");
        return *ball;
    }
};

// Point reflection through the field center. With `swap_teams` the attacking and defending
// sides exchange roles; the holder index is kept only when teams are not swapped.
inline GameState mirrored(const GameState& s, bool swap_teams = false) {
    GameState m = s;
    auto flip = [](std::vector<PlayerState>& ps) {
        for (auto& p : ps) {
            p.position = -p.position;
            p.velocity = -p.velocity;
        }
    };
    flip(m.attackers);
    flip(m.defenders);
    if (m.ball) m.ball = -*m.ball;
    m.attack_direction = -s.attack_direction;
    if (swap_teams) {
        std::swap(m.attackers, m.defenders);
        m.holder.reset();
        m.attack_direction = s.attack_direction;
    }
    return m;
}

// Builds the state for `frame_index` with `attacking` in possession. With `orient` the frame is
// reflected so the attack always points toward +x. Throws InputError when any player position
// is missing; callers skip such frames.
inline GameState game_state(const SpaceDataset& ds, std::size_t frame_index, Team attacking, bool orient = true) {
    if (frame_index >= ds.size()) throw RangeError("frame index out of range");
    const FrameSnapshot& f = ds.frames()[frame_index];
    const int dir = ds.attack_direction(attacking, f.period);
    const double sign = (orient && dir < 0) ? -1.0 : 1.0;

    GameState s;
    s.time = f.time;
    s.frame_index = frame_index;
    s.attack_direction = orient ? +1 : dir;
    auto collect = [&](Team t, std::vector<PlayerState>& out) {
        const auto& pos = f.side(t);
        const auto& vel = ds.velocities(frame_index, t);
        for (std::size_t i = 0; i < pos.size(); ++i) {
            if (!pos[i] || !vel[i])
                throw InputError("frame " + std::to_string(frame_index) + ": missing position for " +
                                 to_string(PlayerRef{t, static_cast<int>(i)}));
            out.push_back({PlayerRef{t, static_cast<int>(i)}, *pos[i] * sign, *vel[i] * sign});
        }
    };
    collect(attacking, s.attackers);
    collect(opponent(attacking), s.defenders);
    if (f.ball) s.ball = *f.ball * sign;
    if (auto h = ds.holder(frame_index); h && h->team == attacking)
        s.holder = static_cast<std::size_t>(h->index);
    return s;
}

inline GameState game_state(const SpaceDataset& ds, std::size_t frame_index, bool orient = true) {
    auto team = ds.possession(frame_index);
    if (!team) throw InputError("frame " + std::to_string(frame_index) + " has no possession label");
    return game_state(ds, frame_index, *team, orient);
}

}  // namespace spacefield
