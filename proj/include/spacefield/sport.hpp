#pragma once

#include <string>
#include <string_view>

#include "spacefield/errors.hpp"
#include "spacefield/kinematics.hpp"

namespace spacefield {

enum class Sport { Ultimate, Soccer, Basketball };
enum class Team { Home, Away };

inline Team opponent(Team t) { return t == Team::Home ? Team::Away : Team::Home; }

inline std::string_view to_string(Team t) { return t == Team::Home ? "Home" : "Away"; }

inline std::string_view to_string(Sport s) {
    switch (s) {
        case Sport::Ultimate: return "ultimate";
        case Sport::Soccer: return "soccer";
        case Sport::Basketball: return "basketball";
    }
    return "unknown";
}

inline Sport parse_sport(std::string_view s) {
    if (s == "ultimate") return Sport::Ultimate;
    if (s == "soccer") return Sport::Soccer;
    if (s == "basketball") return Sport::Basketball;
    throw ConfigError("unknown sport '" + std::string(s) + "'");
}

// Field geometry and per-sport defaults. Coordinates are meters with the origin at the
// field center and x along the field length; the attacking target sits at +x.
struct SportConfig {
    Sport sport = Sport::Soccer;
    double field_length = 105.0;
    double field_width = 68.0;
    double endzone_depth = 0.0;   // Ultimate only
    int players_per_side = 11;
    double sample_rate = 25.0;    // Hz
    // Scoring target: goal/basket center distance from the attacking end line (0 for a goal mouth).
    double target_inset = 0.0;
    PlayerMotionParams attacker;
    PlayerMotionParams defender;
    BallModel ball;

    double half_length() const { return field_length / 2.0; }
    double half_width() const { return field_width / 2.0; }
    double frame_interval() const { return 1.0 / sample_rate; }

    void validate() const {
        if (!(field_length > 0.0)) throw ConfigError("field_length must be > 0");
        if (!(field_width > 0.0)) throw ConfigError("field_width must be > 0");
        if (players_per_side < 1) throw ConfigError("players_per_side must be >= 1");
        if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be > 0");
        if (!(endzone_depth >= 0.0) || !(2.0 * endzone_depth < field_length))
            throw ConfigError("endzone_depth must satisfy 0 <= 2*depth < field_length");
        attacker.validate();
        defender.validate();
        ball.validate();
    }

    static SportConfig soccer() { return SportConfig{}; }

    // UFA field: 80 x 53 1/3 yards including two 20-yard end zones.
    static SportConfig ultimate() {
        SportConfig c;
        c.sport = Sport::Ultimate;
        c.field_length = 109.73;
        c.field_width = 48.77;
        c.endzone_depth = 18.288;
        c.players_per_side = 7;
        c.sample_rate = 10.0;
        c.ball.speed = 12.0;
        return c;
    }

    static SportConfig basketball() {
        SportConfig c;
        c.sport = Sport::Basketball;
        c.field_length = 28.65;
        c.field_width = 15.24;
        c.players_per_side = 5;
        c.sample_rate = 25.0;
        c.target_inset = 1.575;
        c.ball.speed = 10.0;
        return c;
    }

    static SportConfig for_sport(Sport s) {
        switch (s) {
            case Sport::Ultimate: return ultimate();
            case Sport::Basketball: return basketball();
            case Sport::Soccer: break;
        }
        return soccer();
    }
};

}  // namespace spacefield
