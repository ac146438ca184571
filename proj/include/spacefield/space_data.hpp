#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spacefield/csv.hpp"
#include "spacefield/errors.hpp"
#include "spacefield/geometry.hpp"
#include "spacefield/sport.hpp"

namespace spacefield {

using Position = std::optional<Vec2>;

struct PlayerRef {
    Team team = Team::Home;
    int index = 0;  // zero-based; rendered 1-based as "Home_3"

    friend bool operator==(const PlayerRef&, const PlayerRef&) = default;
};

inline std::string to_string(PlayerRef p) {
    return std::string(to_string(p.team)) + "_" + std::to_string(p.index + 1);
}

// Accepts "Home_3"/"Away_5", or a bare 1-based number resolved against `context`.
inline std::optional<PlayerRef> parse_player_ref(std::string_view s, std::optional<Team> context = {}) {
    auto number = [](std::string_view digits) -> std::optional<int> {
        int v = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || v < 1) return std::nullopt;
        return v;
    };
    for (Team t : {Team::Home, Team::Away}) {
        const std::string prefix = std::string(to_string(t)) + "_";
        if (s.starts_with(prefix)) {
            if (auto n = number(s.substr(prefix.size()))) return PlayerRef{t, *n - 1};
            return std::nullopt;
        }
    }
    if (context) {
        if (auto n = number(s)) return PlayerRef{*context, *n - 1};
    }
    return std::nullopt;
}

// One row of the event table. Blank coordinates are stored as NaN.
struct EventRecord {
    Team team = Team::Home;
    std::string type;
    std::string subtype;
    int period = 1;
    long start_frame = 0;
    double start_time = 0.0;
    long end_frame = 0;
    double end_time = 0.0;
    std::string from;
    std::string to;
    double start_x = std::nan("");
    double start_y = std::nan("");
    double end_x = std::nan("");
    double end_y = std::nan("");
    bool out_of_bounds = false;

    std::optional<Vec2> start_point() const {
        if (std::isnan(start_x) || std::isnan(start_y)) return std::nullopt;
        return Vec2{start_x, start_y};
    }
    std::optional<Vec2> end_point() const {
        if (std::isnan(end_x) || std::isnan(end_y)) return std::nullopt;
        return Vec2{end_x, end_y};
    }
};

struct FrameSnapshot {
    int period = 1;
    double time = 0.0;
    std::vector<Position> home;
    std::vector<Position> away;
    Position ball;

    const std::vector<Position>& side(Team t) const { return t == Team::Home ? home : away; }
    std::vector<Position>& side(Team t) { return t == Team::Home ? home : away; }
};

// One side's tracking file as parsed, before alignment with the other side.
struct TrackingRow {
    int period = 1;
    double time = 0.0;
    std::vector<Position> players;
    Position ball;
};

struct TrackingTable {
    Team side = Team::Home;
    int players_per_side = 0;
    std::vector<TrackingRow> rows;
};

// ---------------------------------------------------------------------------
// CSV formats

inline constexpr const char* kTrackingPeriod = "Period";
inline constexpr const char* kTrackingTime = "Time [s]";

inline std::vector<std::string> tracking_columns(Team side, int k) {
    std::vector<std::string> cols{kTrackingPeriod, kTrackingTime};
    const std::string prefix(to_string(side));
    for (int i = 1; i <= k; ++i) {
        cols.push_back(prefix + "_" + std::to_string(i) + "_x");
        cols.push_back(prefix + "_" + std::to_string(i) + "_y");
    }
    cols.emplace_back("ball_x");
    cols.emplace_back("ball_y");
    return cols;
}

inline const std::vector<std::string>& event_columns() {
    static const std::vector<std::string> cols{
        "Team", "Type", "Subtype", "Period", "Start Frame", "Start Time [s]", "End Frame",
        "End Time [s]", "From", "To", "Start X", "Start Y", "End X", "End Y"};
    return cols;
}

namespace detail {

inline Position parse_position(const std::string& xs, const std::string& ys, std::size_t row,
                               const std::string& what) {
    std::optional<double> x, y;
    try {
        x = csv::parse_double(xs);
        y = csv::parse_double(ys);
    } catch (const ParseError& e) {
        throw ParseError("row " + std::to_string(row) + ", " + what + ": " + e.what());
    }
    if (x.has_value() != y.has_value())
        throw ParseError("row " + std::to_string(row) + ", " + what +
                         ": position must have both coordinates or neither");
    if (!x) return std::nullopt;
    return Vec2{*x, *y};
}

inline int parse_period(const std::string& s, std::size_t row) {
    std::optional<long> p;
    try {
        p = csv::parse_integer(s);
    } catch (const ParseError& e) {
        throw ParseError("row " + std::to_string(row) + ", Period: " + e.what());
    }
    if (!p) throw ParseError("row " + std::to_string(row) + ": empty Period");
    if (*p < 1 || *p > 4)
        throw ValidationError("row " + std::to_string(row) + ": period " + std::to_string(*p) +
                              " outside 1..4");
    return static_cast<int>(*p);
}

inline double parse_required_double(const std::string& s, std::size_t row, const char* col) {
    std::optional<double> v;
    try {
        v = csv::parse_double(s);
    } catch (const ParseError& e) {
        throw ParseError("row " + std::to_string(row) + ", " + col + ": " + e.what());
    }
    if (!v) throw ParseError("row " + std::to_string(row) + ": empty " + col);
    return *v;
}

inline void write_position(std::ostream& out, const Position& p) {
    if (p) out << ',' << csv::format_double(p->x) << ',' << csv::format_double(p->y);
    else out << ",,";
}

}  // namespace detail

// Reads one side's tracking CSV. Columns are located by name; extra columns are ignored.
// Row indices in error messages are 1-based data rows.
inline TrackingTable parse_tracking(std::istream& in, const SportConfig& config, Team side) {
    const int k = config.players_per_side;
    std::vector<std::string> fields;
    if (!csv::read_record(in, fields)) throw SchemaError("tracking file has no header row");
    const csv::Header header(fields);
    const auto cols = tracking_columns(side, k);
    std::vector<std::size_t> idx;
    idx.reserve(cols.size());
    for (const auto& c : cols) idx.push_back(header.require(c));

    TrackingTable table{side, k, {}};
    std::size_t row = 0;
    while (csv::read_record(in, fields)) {
        ++row;
        if (fields.size() < header.size())
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(fields.size()));
        TrackingRow r;
        r.period = detail::parse_period(fields[idx[0]], row);
        r.time = detail::parse_required_double(fields[idx[1]], row, kTrackingTime);
        r.players.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const std::size_t cx = idx[2 + 2 * static_cast<std::size_t>(i)];
            const std::size_t cy = idx[3 + 2 * static_cast<std::size_t>(i)];
            r.players.push_back(detail::parse_position(fields[cx], fields[cy], row, cols[2 + 2 * i]));
        }
        r.ball = detail::parse_position(fields[idx[cols.size() - 2]], fields[idx[cols.size() - 1]], row,
                                        "ball");
        table.rows.push_back(std::move(r));
    }
    return table;
}

inline void write_tracking(std::ostream& out, const TrackingTable& table) {
    const auto cols = tracking_columns(table.side, table.players_per_side);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : table.rows) {
        out << r.period << ',' << csv::format_double(r.time);
        for (const auto& p : r.players) detail::write_position(out, p);
        detail::write_position(out, r.ball);
        out << '\n';
    }
}

inline Team parse_team(const std::string& s, std::size_t row) {
    if (s == "Home") return Team::Home;
    if (s == "Away") return Team::Away;
    throw ParseError("row " + std::to_string(row) + ": unknown Team '" + s + "'");
}

// Reads the event table, validates each record and returns it sorted by start time.
inline std::vector<EventRecord> parse_events(std::istream& in, const SportConfig& config) {
    (void)config;
    std::vector<std::string> fields;
    if (!csv::read_record(in, fields)) throw SchemaError("event file has no header row");
    const csv::Header header(fields);
    std::vector<std::size_t> idx;
    for (const auto& c : event_columns()) idx.push_back(header.require(c));

    auto opt_double = [&](std::size_t row, std::size_t col) {
        try {
            return csv::parse_double(fields[idx[col]]).value_or(std::nan(""));
        } catch (const ParseError& e) {
            throw ParseError("row " + std::to_string(row) + ", " + event_columns()[col] + ": " + e.what());
        }
    };
    auto req_long = [&](std::size_t row, std::size_t col) {
        try {
            if (auto v = csv::parse_integer(fields[idx[col]])) return *v;
        } catch (const ParseError& e) {
            throw ParseError("row " + std::to_string(row) + ", " + event_columns()[col] + ": " + e.what());
        }
        throw ParseError("row " + std::to_string(row) + ": empty " + event_columns()[col]);
    };

    std::vector<EventRecord> events;
    std::size_t row = 0;
    while (csv::read_record(in, fields)) {
        ++row;
        if (fields.size() < header.size())
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(header.size()) + " cells");
        EventRecord e;
        e.team = parse_team(fields[idx[0]], row);
        e.type = fields[idx[1]];
        e.subtype = fields[idx[2]];
        e.period = detail::parse_period(fields[idx[3]], row);
        e.start_frame = req_long(row, 4);
        e.start_time = detail::parse_required_double(fields[idx[5]], row, "Start Time [s]");
        e.end_frame = req_long(row, 6);
        e.end_time = detail::parse_required_double(fields[idx[7]], row, "End Time [s]");
        e.from = fields[idx[8]];
        e.to = fields[idx[9]];
        e.start_x = opt_double(row, 10);
        e.start_y = opt_double(row, 11);
        e.end_x = opt_double(row, 12);
        e.end_y = opt_double(row, 13);
        if (e.start_frame > e.end_frame || e.start_time > e.end_time)
            throw ValidationError("row " + std::to_string(row) + ": event " + e.type + " starts after it ends (frames " +
                                  std::to_string(e.start_frame) + ".." + std::to_string(e.end_frame) +
                                  ", times " + csv::format_double(e.start_time) + ".." +
                                  csv::format_double(e.end_time) + ")");
        events.push_back(std::move(e));
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.start_time < b.start_time; });
    return events;
}

inline void write_events(std::ostream& out, std::span<const EventRecord> events) {
    const auto& cols = event_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    auto coord = [](double v) { return std::isnan(v) ? std::string{} : csv::format_double(v); };
    for (const auto& e : events) {
        out << to_string(e.team) << ',' << csv::quote(e.type) << ',' << csv::quote(e.subtype) << ','
            << e.period << ',' << e.start_frame << ',' << csv::format_double(e.start_time) << ','
            << e.end_frame << ',' << csv::format_double(e.end_time) << ',' << csv::quote(e.from) << ','
            << csv::quote(e.to) << ',' << coord(e.start_x) << ',' << coord(e.start_y) << ','
            << coord(e.end_x) << ',' << coord(e.end_y) << '\n';
    }
}

// Marks events whose coordinates fall more than `tolerance` meters outside the field.
inline std::size_t flag_out_of_bounds(std::vector<EventRecord>& events, const SportConfig& config,
                                      double tolerance = 0.5) {
    const double hx = config.half_length() + tolerance;
    const double hy = config.half_width() + tolerance;
    auto outside = [&](double x, double y) {
        return !std::isnan(x) && !std::isnan(y) && (std::abs(x) > hx || std::abs(y) > hy);
    };
    std::size_t flagged = 0;
    for (auto& e : events) {
        e.out_of_bounds = outside(e.start_x, e.start_y) || outside(e.end_x, e.end_y);
        flagged += e.out_of_bounds;
    }
    return flagged;
}

// ---------------------------------------------------------------------------
// Coordinate normalization

// Source coordinate system of a data provider. The map to the metric frame is affine:
// scale each axis to the configured field, then move the origin to the field center.
struct ProviderSpec {
    std::string id;
    double source_length = 0.0;  // source units spanning the field length; 0 = use field length
    double source_width = 0.0;
    bool corner_origin = false;  // source (0,0) at a field corner rather than the center
    bool flip_y = false;

    // Registry of built-in providers.
    static ProviderSpec lookup(std::string_view id) {
        if (id == "metric" || id == "identity") return {std::string(id), 0.0, 0.0, false, false};
        if (id == "ufa" || id == "UFA" || id == "metric_corner") return {std::string(id), 0.0, 0.0, true, false};
        if (id == "statsbomb" || id == "fifa_wc_2022") return {std::string(id), 100.0, 100.0, true, false};
        throw ConfigError("unknown provider '" + std::string(id) + "'");
    }
};

inline Vec2 normalize_point(Vec2 p, const ProviderSpec& provider, const SportConfig& config) {
    const double sl = provider.source_length > 0.0 ? provider.source_length : config.field_length;
    const double sw = provider.source_width > 0.0 ? provider.source_width : config.field_width;
    const double cx = provider.corner_origin ? sl / 2.0 : 0.0;
    const double cy = provider.corner_origin ? sw / 2.0 : 0.0;
    const double y = (p.y - cy) * (config.field_width / sw);
    return {(p.x - cx) * (config.field_length / sl), provider.flip_y ? -y : y};
}

inline std::vector<Position> normalize_coordinates(std::span<const Position> positions,
                                                   const ProviderSpec& provider, const SportConfig& config) {
    std::vector<Position> out;
    out.reserve(positions.size());
    for (const auto& p : positions) out.push_back(p ? Position{normalize_point(*p, provider, config)} : std::nullopt);
    return out;
}

inline void normalize_table(TrackingTable& table, const ProviderSpec& provider, const SportConfig& config) {
    for (auto& r : table.rows) {
        for (auto& p : r.players)
            if (p) p = normalize_point(*p, provider, config);
        if (r.ball) r.ball = normalize_point(*r.ball, provider, config);
    }
}

inline void normalize_events(std::vector<EventRecord>& events, const ProviderSpec& provider,
                             const SportConfig& config) {
    for (auto& e : events) {
        if (auto s = e.start_point()) {
            const Vec2 n = normalize_point(*s, provider, config);
            e.start_x = n.x;
            e.start_y = n.y;
        }
        if (auto t = e.end_point()) {
            const Vec2 n = normalize_point(*t, provider, config);
            e.end_x = n.x;
            e.end_y = n.y;
        }
    }
}

// ---------------------------------------------------------------------------
// Disc / ball reconstruction from possession events

struct DiscTrack {
    std::vector<Position> ball;
    std::vector<std::optional<PlayerRef>> holder;
};

// Ball position per frame from possession events: the holder's position while held, and a
// straight line between the release and catch points while in flight. Event frame indices
// refer to `frames`.
inline DiscTrack interpolate_disc(std::span<const EventRecord> events, std::span<const FrameSnapshot> frames) {
    struct Flight {
        long start, end;
        Vec2 from, to;
    };
    struct Hold {
        long frame;
        std::optional<PlayerRef> player;  // nullopt: loose ball at `point`
        Position point;
    };
    std::vector<Flight> flights;
    std::vector<Hold> holds;

    auto position_of = [&](PlayerRef p, long f) -> Position {
        if (f < 0 || static_cast<std::size_t>(f) >= frames.size()) return std::nullopt;
        const auto& side = frames[static_cast<std::size_t>(f)].side(p.team);
        if (p.index < 0 || static_cast<std::size_t>(p.index) >= side.size()) return std::nullopt;
        return side[static_cast<std::size_t>(p.index)];
    };

    for (const auto& e : events) {
        auto from = parse_player_ref(e.from, e.team);
        if (!from) continue;
        auto to = parse_player_ref(e.to, e.team);
        holds.push_back({e.start_frame, from, std::nullopt});
        if (e.end_frame > e.start_frame) {
            Position a = e.start_point();
            if (!a) a = position_of(*from, e.start_frame);
            Position b = e.end_point();
            if (!b && to) b = position_of(*to, e.end_frame);
            if (a && b) flights.push_back({e.start_frame, e.end_frame, *a, *b});
            if (to) holds.push_back({e.end_frame, to, std::nullopt});
            else if (b) holds.push_back({e.end_frame, std::nullopt, b});
        }
    }
    if (holds.empty()) throw InputError("no possession events: cannot anchor the disc");
    std::stable_sort(holds.begin(), holds.end(), [](const Hold& a, const Hold& b) { return a.frame < b.frame; });

    DiscTrack track;
    track.ball.assign(frames.size(), std::nullopt);
    track.holder.assign(frames.size(), std::nullopt);

    std::size_t h = 0;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const long fl = static_cast<long>(f);
        while (h + 1 < holds.size() && holds[h + 1].frame <= fl) ++h;
        const Hold& cur = holds[h];
        track.holder[f] = cur.player;
        if (cur.player) track.ball[f] = position_of(*cur.player, fl);
        else track.ball[f] = cur.point;
    }
    for (const auto& fl : flights) {
        const double span = static_cast<double>(fl.end - fl.start);
        for (long f = std::max(0L, fl.start); f <= fl.end && static_cast<std::size_t>(f) < frames.size(); ++f) {
            const auto uf = static_cast<std::size_t>(f);
            track.ball[uf] = lerp(fl.from, fl.to, static_cast<double>(f - fl.start) / span);
            if (f != fl.start && f != fl.end) track.holder[uf] = std::nullopt;
        }
    }
    return track;
}

// ---------------------------------------------------------------------------
// Aligned dataset

struct DatasetOptions {
    double max_gap_seconds = 0.5;   // longer gaps stay missing
    int velocity_smoothing = 1;     // centered moving-average window over velocities (1 = none)
    // Attack direction of the home team per period (+1 toward +x); the away team attacks the other way.
    std::vector<int> home_direction{+1, -1, +1, -1};
};

class SpaceDataset {
public:
    SpaceDataset() = default;

    const SportConfig& config() const { return config_; }
    const DatasetOptions& options() const { return options_; }
    const std::vector<FrameSnapshot>& frames() const { return frames_; }
    const std::vector<EventRecord>& events() const { return events_; }
    std::size_t size() const { return frames_.size(); }

    const std::vector<Position>& velocities(std::size_t frame, Team t) const {
        return t == Team::Home ? home_velocity_[frame] : away_velocity_[frame];
    }
    std::optional<Team> possession(std::size_t frame) const { return possession_[frame]; }
    std::optional<PlayerRef> holder(std::size_t frame) const { return holder_[frame]; }

    int attack_direction(Team t, int period) const {
        const auto& dirs = options_.home_direction;
        int home = dirs.empty() ? 1 : dirs[static_cast<std::size_t>(period - 1) % dirs.size()];
        return t == Team::Home ? home : -home;
    }

    // Indices of the contiguous frames sharing the possession label of `frame`.
    std::pair<std::size_t, std::size_t> possession_span(std::size_t frame) const {
        const auto label = possession_[frame];
        std::size_t a = frame, b = frame;
        while (a > 0 && possession_[a - 1] == label && frames_[a - 1].period == frames_[frame].period) --a;
        while (b + 1 < frames_.size() && possession_[b + 1] == label &&
               frames_[b + 1].period == frames_[frame].period)
            ++b;
        return {a, b + 1};
    }

private:
    friend SpaceDataset build_dataset(const TrackingTable&, const TrackingTable&, std::vector<EventRecord>,
                                      const SportConfig&, const DatasetOptions&);

    SportConfig config_;
    DatasetOptions options_;
    std::vector<FrameSnapshot> frames_;
    std::vector<EventRecord> events_;
    std::vector<std::vector<Position>> home_velocity_;
    std::vector<std::vector<Position>> away_velocity_;
    std::vector<std::optional<Team>> possession_;
    std::vector<std::optional<PlayerRef>> holder_;
};

namespace detail {

// Fills interior runs of missing samples no longer than max_run by linear interpolation.
// `get` returns a reference to the Position stored for index i.
template <typename Get>
void fill_short_gaps(std::size_t begin, std::size_t end, std::size_t max_run, Get&& get) {
    std::optional<std::size_t> last;
    for (std::size_t i = begin; i < end; ++i) {
        if (!get(i)) continue;
        if (last && i - *last > 1 && i - *last - 1 <= max_run) {
            const Vec2 a = *get(*last);
            const Vec2 b = *get(i);
            const double span = static_cast<double>(i - *last);
            for (std::size_t j = *last + 1; j < i; ++j)
                get(j) = lerp(a, b, static_cast<double>(j - *last) / span);
        }
        last = i;
    }
}

template <typename Get>
std::vector<Position> finite_difference(std::size_t begin, std::size_t end, double dt, Get&& get) {
    std::vector<Position> v(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        const Position& p = get(i);
        if (!p) continue;
        const bool prev = i > begin && get(i - 1).has_value();
        const bool next = i + 1 < end && get(i + 1).has_value();
        if (prev && next) v[i - begin] = (*get(i + 1) - *get(i - 1)) / (2.0 * dt);
        else if (next) v[i - begin] = (*get(i + 1) - *p) / dt;
        else if (prev) v[i - begin] = (*p - *get(i - 1)) / dt;
        else v[i - begin] = Vec2{0.0, 0.0};
    }
    return v;
}

inline std::vector<Position> smooth(const std::vector<Position>& v, int window) {
    if (window <= 1) return v;
    const std::ptrdiff_t half = window / 2;
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    std::vector<Position> out(v.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (!v[static_cast<std::size_t>(i)]) continue;
        Vec2 sum{};
        int count = 0;
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - half); j <= std::min(n - 1, i + half); ++j) {
            if (const auto& s = v[static_cast<std::size_t>(j)]) {
                sum += *s;
                ++count;
            }
        }
        out[static_cast<std::size_t>(i)] = sum / count;
    }
    return out;
}

}  // namespace detail

// Merges both tracking sides onto a common 1/sample-rate timeline per period, fills short gaps,
// reconstructs a missing ball from possession events, and derives velocities and labels.
inline SpaceDataset build_dataset(const TrackingTable& home, const TrackingTable& away,
                                  std::vector<EventRecord> events, const SportConfig& config,
                                  const DatasetOptions& options = {}) {
    config.validate();
    if (home.side != Team::Home || away.side != Team::Away)
        throw ValidationError("build_dataset expects a Home and an Away tracking table");
    const double rate = config.sample_rate;
    const auto k = static_cast<std::size_t>(config.players_per_side);

    using Slots = std::map<int, std::map<long, const TrackingRow*>>;
    auto index_side = [&](const TrackingTable& t) {
        Slots slots;
        for (const auto& r : t.rows) {
            if (r.players.size() != k)
                throw ValidationError(std::string(to_string(t.side)) + " tracking has " +
                                      std::to_string(r.players.size()) + " players, expected " +
                                      std::to_string(k));
            const long slot = std::lround(r.time * rate);
            auto [it, fresh] = slots[r.period].emplace(slot, &r);
            if (!fresh)
                throw ValidationError(std::string(to_string(t.side)) + " tracking has duplicate timestamp " +
                                      csv::format_double(r.time) + " in period " + std::to_string(r.period));
        }
        return slots;
    };
    const Slots hs = index_side(home);
    const Slots as = index_side(away);
    if (hs.empty() || as.empty()) throw AlignmentError("tracking data is empty");
    for (const auto& [p, _] : hs)
        if (!as.contains(p)) throw AlignmentError("period " + std::to_string(p) + " missing from Away tracking");
    for (const auto& [p, _] : as)
        if (!hs.contains(p)) throw AlignmentError("period " + std::to_string(p) + " missing from Home tracking");

    SpaceDataset ds;
    ds.config_ = config;
    ds.options_ = options;
    std::vector<std::pair<std::size_t, std::size_t>> period_ranges;
    for (const auto& [period, hslots] : hs) {
        const auto& aslots = as.at(period);
        const long lo = std::max(hslots.begin()->first, aslots.begin()->first);
        const long hi = std::min(hslots.rbegin()->first, aslots.rbegin()->first);
        if (lo > hi) throw AlignmentError("home and away time ranges do not overlap in period " + std::to_string(period));
        const std::size_t first = ds.frames_.size();
        for (long s = lo; s <= hi; ++s) {
            FrameSnapshot f;
            f.period = period;
            f.time = static_cast<double>(s) / rate;
            f.home.assign(k, std::nullopt);
            f.away.assign(k, std::nullopt);
            auto h = hslots.find(s);
            auto a = aslots.find(s);
            if (h != hslots.end()) {
                f.home = h->second->players;
                f.ball = h->second->ball;
            }
            if (a != aslots.end()) {
                f.away = a->second->players;
                if (!f.ball) f.ball = a->second->ball;
            }
            ds.frames_.push_back(std::move(f));
        }
        period_ranges.emplace_back(first, ds.frames_.size());
    }

    const auto max_run = static_cast<std::size_t>(std::floor(options.max_gap_seconds * rate + 1e-9));
    for (auto [b, e] : period_ranges) {
        for (Team t : {Team::Home, Team::Away})
            for (std::size_t i = 0; i < k; ++i)
                detail::fill_short_gaps(b, e, max_run,
                                        [&](std::size_t f) -> Position& { return ds.frames_[f].side(t)[i]; });
    }

    for (const auto& e : events) {
        if (e.start_frame < 0 || e.end_frame < 0 || static_cast<std::size_t>(e.end_frame) >= ds.frames_.size())
            throw ValidationError("event " + e.type + " at " + csv::format_double(e.start_time) +
                                  " s references frame outside the aligned range");
    }

    // Ball reconstruction and holders from possession events, when any carry a player id.
    const bool has_possession = std::any_of(events.begin(), events.end(),
                                            [](const EventRecord& e) { return parse_player_ref(e.from, e.team).has_value(); });
    ds.holder_.assign(ds.frames_.size(), std::nullopt);
    if (has_possession) {
        DiscTrack disc = interpolate_disc(events, ds.frames_);
        for (std::size_t f = 0; f < ds.frames_.size(); ++f) {
            if (!ds.frames_[f].ball) ds.frames_[f].ball = disc.ball[f];
        }
        ds.holder_ = std::move(disc.holder);
    }
    for (auto [b, e] : period_ranges)
        detail::fill_short_gaps(b, e, max_run, [&](std::size_t f) -> Position& { return ds.frames_[f].ball; });

    ds.possession_.assign(ds.frames_.size(), std::nullopt);
    {
        std::size_t ei = 0;
        std::vector<const EventRecord*> by_frame;
        for (const auto& e : events) by_frame.push_back(&e);
        std::stable_sort(by_frame.begin(), by_frame.end(),
                         [](const EventRecord* a, const EventRecord* b) { return a->start_frame < b->start_frame; });
        std::optional<Team> current;
        for (std::size_t f = 0; f < ds.frames_.size(); ++f) {
            while (ei < by_frame.size() && static_cast<std::size_t>(by_frame[ei]->start_frame) <= f)
                current = by_frame[ei++]->team;
            ds.possession_[f] = current;
        }
    }

    const double dt = 1.0 / rate;
    ds.home_velocity_.assign(ds.frames_.size(), std::vector<Position>(k));
    ds.away_velocity_.assign(ds.frames_.size(), std::vector<Position>(k));
    for (auto [b, e] : period_ranges) {
        for (Team t : {Team::Home, Team::Away}) {
            auto& vel = t == Team::Home ? ds.home_velocity_ : ds.away_velocity_;
            for (std::size_t i = 0; i < k; ++i) {
                auto v = detail::finite_difference(
                    b, e, dt, [&](std::size_t f) -> const Position& { return ds.frames_[f].side(t)[i]; });
                v = detail::smooth(v, options.velocity_smoothing);
                for (std::size_t f = b; f < e; ++f) vel[f][i] = v[f - b];
            }
        }
    }

    ds.events_ = std::move(events);
    return ds;
}

}  // namespace spacefield
