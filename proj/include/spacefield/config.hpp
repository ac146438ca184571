#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spacefield/bimos.hpp"
#include "spacefield/crsv.hpp"
#include "spacefield/errors.hpp"
#include "spacefield/obso.hpp"
#include "spacefield/parallel.hpp"
#include "spacefield/sport.hpp"

namespace spacefield {

enum class SpaceModel { Ppcf, Obso, Wuppcf, Bimos };

inline std::string_view to_string(SpaceModel m) {
    switch (m) {
        case SpaceModel::Ppcf: return "ppcf";
        case SpaceModel::Obso: return "obso";
        case SpaceModel::Wuppcf: return "wuppcf";
        case SpaceModel::Bimos: return "bimos";
    }
    return "?";
}

inline SpaceModel parse_space_model(std::string_view s) {
    std::string low(s);
    for (char& ch : low) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (low == "ppcf") return SpaceModel::Ppcf;
    if (low == "obso") return SpaceModel::Obso;
    if (low == "wuppcf") return SpaceModel::Wuppcf;
    if (low == "bimos") return SpaceModel::Bimos;
    throw ConfigError("unknown space model '" + std::string(s) + "'");
}

struct FrameRange {
    long first = 0;
    long last = -1;  // exclusive; -1 = to the end
};

// "a:b" half-open; either side may be empty.
inline FrameRange parse_frame_range(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("frame range must look like a:b");
    FrameRange r;
    try {
        if (colon > 0) r.first = std::stol(s.substr(0, colon));
        if (colon + 1 < s.size()) r.last = std::stol(s.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("bad frame range '" + s + "'");
    }
    if (r.first < 0 || (r.last >= 0 && r.last <= r.first)) throw ConfigError("empty frame range '" + s + "'");
    return r;
}

// "min:max:step", inclusive of both ends.
inline std::vector<int> parse_xi_range(const std::string& s) {
    std::vector<int> parts;
    std::stringstream ss(s);
    std::string tok;
    try {
        while (std::getline(ss, tok, ':')) parts.push_back(std::stoi(tok));
    } catch (const std::exception&) {
        throw ConfigError("bad xi range '" + s + "'");
    }
    if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0]) throw ConfigError("xi range must be min:max:step");
    std::vector<int> out;
    for (int x = parts[0]; x <= parts[1]; x += parts[2]) out.push_back(x);
    return out;
}

// "NXxNY"
inline std::pair<int, int> parse_grid_size(const std::string& s) {
    const auto x = s.find_first_of("xX");
    try {
        if (x != std::string::npos) {
            const int nx = std::stoi(s.substr(0, x)), ny = std::stoi(s.substr(x + 1));
            if (nx >= 1 && ny >= 1) return {nx, ny};
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("grid must look like NXxNY, got '" + s + "'");
}

struct RunConfig {
    SpaceModel model = SpaceModel::Ppcf;
    Sport sport = Sport::Soccer;
    std::string provider = "metric";
    std::string event_data;
    std::string tracking_home;
    std::string tracking_away;
    std::string out_path;
    std::optional<std::pair<int, int>> grid;
    FrameRange frames;
    int frame_stride = 1;
    std::optional<std::string> receiver;  // e.g. "Home_3"
    std::optional<long> initiation_frame;
    std::vector<int> xi_range{-20, -15, -10, -5, 0, 5, 10, 15, 20};
    unsigned jobs = default_jobs();
    bool render = false;
    BimosCombine bimos_combine = BimosCombine::Mix;
    double ratio_tau = 0.7;
    double ratio_delta = 5.0;
    std::map<std::string, double> params;  // numeric model overrides, see apply_overrides

    void validate() const {
        if (event_data.empty() || tracking_home.empty() || tracking_away.empty())
            throw ConfigError("event-data, tracking-home and tracking-away are required");
        if (out_path.empty()) throw ConfigError("out-path is required");
        if (frame_stride < 1) throw ConfigError("frame stride must be >= 1");
        if (receiver.has_value() != initiation_frame.has_value())
            throw ConfigError("receiver and initiation-frame go together");
        if (receiver && model != SpaceModel::Wuppcf) throw ConfigError("receiver timing needs the wuppcf model");
        if (jobs < 1) throw ConfigError("jobs must be >= 1");
        ProviderSpec::lookup(provider);
    }
};

inline const std::vector<std::string>& override_keys() {
    static const std::vector<std::string> keys{
        "reaction_time",   "max_speed",      "max_acceleration",  "arrival_uncertainty", "control_rate",
        "defender_rate_factor", "ball_speed", "dribble_speed",    "dt",                  "t_max",
        "transition_sigma", "score_midpoint", "score_steepness",  "endzone_decay",       "free_radius",
        "distance_scale",  "shadow_half_angle", "meet_tolerance", "horizon",             "window",
        "dribble_radius",  "pass_weight",    "dribble_weight"};
    return keys;
}

struct ModelParams {
    PitchControlParams control;
    ObsoParams obso;
    CrsvParams crsv;
    PbcfParams pbcf;
};

// Sport defaults with the numeric overrides applied to every model that uses them.
inline ModelParams model_params(const RunConfig& rc, const SportConfig& sport) {
    for (const auto& [k, v] : rc.params)
        if (std::find(override_keys().begin(), override_keys().end(), k) == override_keys().end())
            throw ConfigError("unknown parameter override '" + k + "'");
    auto get = [&](const char* k) -> std::optional<double> {
        auto it = rc.params.find(k);
        return it == rc.params.end() ? std::nullopt : std::optional(it->second);
    };
    PitchControlParams c = PitchControlParams::from_sport(sport, get("defender_rate_factor").value_or(1.0));
    for (PlayerMotionParams* m : {&c.attacker, &c.defender}) {
        if (auto v = get("reaction_time")) m->reaction_time = *v;
        if (auto v = get("max_speed")) m->max_speed = *v;
        if (auto v = get("max_acceleration")) m->max_acceleration = *v;
        if (auto v = get("arrival_uncertainty")) m->arrival_uncertainty = *v;
    }
    if (auto v = get("control_rate")) {
        c.attacker.control_rate = *v;
        c.defender.control_rate = *v * get("defender_rate_factor").value_or(1.0);
    }
    if (auto v = get("ball_speed")) c.ball.speed = *v;
    if (auto v = get("dribble_speed")) c.ball.dribble_speed = *v;
    if (auto v = get("dt")) c.integration.dt = *v;
    if (auto v = get("t_max")) c.integration.t_max = *v;
    c.validate();

    ModelParams mp;
    mp.control = c;
    mp.obso = ObsoParams::for_sport(sport);
    mp.obso.control = c;
    if (auto v = get("transition_sigma")) mp.obso.transition_sigma = *v;
    if (auto v = get("score_midpoint")) mp.obso.score.midpoint = *v;
    if (auto v = get("score_steepness")) mp.obso.score.steepness = *v;
    if (auto v = get("endzone_decay")) mp.obso.score.endzone_decay = *v;

    mp.crsv = CrsvParams::for_sport(sport);
    mp.crsv.control = c;
    mp.crsv.weights.xi_range = rc.xi_range;
    if (std::find(rc.xi_range.begin(), rc.xi_range.end(), 0) == rc.xi_range.end())
        mp.crsv.weights.xi_range.push_back(0);
    if (auto v = get("free_radius")) mp.crsv.weights.free_radius = *v;
    if (auto v = get("distance_scale")) mp.crsv.weights.distance_scale = *v;
    if (auto v = get("shadow_half_angle")) mp.crsv.weights.shadow_half_angle = *v;
    if (auto v = get("meet_tolerance")) mp.crsv.weights.meet_tolerance = *v;
    if (auto v = get("horizon")) mp.crsv.weights.horizon = *v;
    if (auto v = get("window")) mp.crsv.weights.window = static_cast<int>(*v);
    mp.crsv.weights.validate();

    mp.pbcf = PbcfParams::for_sport(sport);
    mp.pbcf.control = c;
    mp.pbcf.combine = rc.bimos_combine;
    if (auto v = get("dribble_radius")) mp.pbcf.dribble_radius = *v;
    if (auto v = get("pass_weight")) mp.pbcf.pass_weight = *v;
    if (auto v = get("dribble_weight")) mp.pbcf.dribble_weight = *v;
    mp.pbcf.validate();
    return mp;
}

// Applies a JSON object whose keys are the dash-case flag names, e.g.
// {"space-model": "wuppcf", "sport": "ultimate", "grid": "55x25", "params": {"ball_speed": 12}}.
inline void apply_config_json(RunConfig& rc, const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (const auto& [key, v] : doc.items()) {
            if (key == "space-model") rc.model = parse_space_model(v.get<std::string>());
            else if (key == "sport") rc.sport = parse_sport(v.get<std::string>());
            else if (key == "provider") rc.provider = v.get<std::string>();
            else if (key == "event-data") rc.event_data = v.get<std::string>();
            else if (key == "tracking-home") rc.tracking_home = v.get<std::string>();
            else if (key == "tracking-away") rc.tracking_away = v.get<std::string>();
            else if (key == "out-path") rc.out_path = v.get<std::string>();
            else if (key == "grid") rc.grid = parse_grid_size(v.get<std::string>());
            else if (key == "frames") rc.frames = parse_frame_range(v.get<std::string>());
            else if (key == "frame-stride") rc.frame_stride = v.get<int>();
            else if (key == "receiver") rc.receiver = v.get<std::string>();
            else if (key == "initiation-frame") rc.initiation_frame = v.get<long>();
            else if (key == "xi-range") rc.xi_range = parse_xi_range(v.get<std::string>());
            else if (key == "jobs") rc.jobs = v.get<unsigned>();
            else if (key == "render") rc.render = v.get<bool>();
            else if (key == "bimos-combine") {
                const auto s = v.get<std::string>();
                if (s == "mix") rc.bimos_combine = BimosCombine::Mix;
                else if (s == "max") rc.bimos_combine = BimosCombine::Max;
                else throw ConfigError("bimos-combine must be mix or max");
            } else if (key == "ratio-tau") rc.ratio_tau = v.get<double>();
            else if (key == "ratio-delta") rc.ratio_delta = v.get<double>();
            else if (key == "params") {
                for (const auto& [pk, pv] : v.items()) rc.params[pk] = pv.get<double>();
            } else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    apply_config_json(base, doc);
    return base;
}

// Defaults, then the file named by SPACEFIELD_CONFIG when set. Callers apply flags afterwards.
inline RunConfig config_from_environment() {
    if (const char* path = std::getenv("SPACEFIELD_CONFIG"); path && *path) return load_config_file(path);
    return {};
}

}  // namespace spacefield
