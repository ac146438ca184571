#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "spacefield/bimos.hpp"
#include "spacefield/config.hpp"
#include "spacefield/crsv.hpp"
#include "spacefield/evaluation.hpp"
#include "spacefield/game_state.hpp"
#include "spacefield/grid.hpp"
#include "spacefield/obso.hpp"
#include "spacefield/parallel.hpp"
#include "spacefield/pitch_control.hpp"
#include "spacefield/render.hpp"
#include "spacefield/report.hpp"
#include "spacefield/space_data.hpp"

namespace spacefield {

namespace fs = std::filesystem;

struct ManifestEntry {
    std::string input_id;
    std::string model;
    std::string path;  // relative to the output directory
    std::uint32_t crc32 = 0;
};

struct BatchFailure {
    std::string input_id;
    std::string message;
};

struct BatchResult {
    std::vector<ManifestEntry> manifest;
    std::vector<BatchFailure> failures;
    std::size_t items = 0;

    // 0 when at least one item succeeded (or there was nothing to do), 1 when every item failed.
    int exit_code() const { return items > 0 && failures.size() == items ? 1 : 0; }
};

struct MatchInput {
    std::string id;
    fs::path events;
    fs::path home;
    fs::path away;
};

inline std::uint32_t crc32_of(std::string_view bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

inline std::string crc_hex(std::uint32_t v) {
    std::ostringstream o;
    o << std::hex << std::setw(8) << std::setfill('0') << v;
    return o.str();
}

// One match per file. With directories, matches are paired by file name across the three
// directories; a name missing from the away or event directory is reported as a failed item.
inline std::vector<MatchInput> discover_inputs(const RunConfig& rc, std::vector<BatchFailure>& failures) {
    const fs::path home(rc.tracking_home), away(rc.tracking_away), events(rc.event_data);
    if (!fs::is_directory(home)) return {{home.stem().string(), events, home, away}};
    if (!fs::is_directory(away) || !fs::is_directory(events))
        throw ConfigError("tracking-home is a directory, so tracking-away and event-data must be too");
    std::vector<fs::path> names;
    for (const auto& e : fs::directory_iterator(home))
        if (e.is_regular_file()) names.push_back(e.path().filename());
    std::sort(names.begin(), names.end());
    std::vector<MatchInput> out;
    for (const auto& n : names) {
        const std::string id = n.stem().string();
        if (!fs::exists(away / n) || !fs::exists(events / n)) {
            failures.push_back({id, "no matching away tracking or event file named '" + n.string() + "'"});
            continue;
        }
        out.push_back({id, events / n, home / n, away / n});
    }
    return out;
}

inline SpaceDataset load_match(const MatchInput& m, const SportConfig& sport, const ProviderSpec& provider) {
    auto open = [](const fs::path& p) {
        std::ifstream in(p);
        if (!in) throw IoError("cannot read '" + p.string() + "'");
        return in;
    };
    auto hin = open(m.home), ain = open(m.away), ein = open(m.events);
    TrackingTable home = parse_tracking(hin, sport, Team::Home);
    TrackingTable away = parse_tracking(ain, sport, Team::Away);
    std::vector<EventRecord> events = parse_events(ein, sport);
    normalize_table(home, provider, sport);
    normalize_table(away, provider, sport);
    normalize_events(events, provider, sport);
    return build_dataset(home, away, std::move(events), sport);
}

struct FrameOutput {
    ControlGrid grid;
    double scalar = 0.0;  // OBSO sum, BIMOS per-cell mean, or attacker mean control
    GameState state;
};

inline FrameOutput compute_frame(const GameState& s, SpaceModel model, const GridSpec& spec, const SportConfig& sport,
                                 const ModelParams& mp) {
    FrameOutput out;
    out.state = s;
    switch (model) {
        case SpaceModel::Ppcf:
            out.grid = ppcf_grid(s, spec, mp.control);
            out.scalar = team_control_summary(out.grid).mean;
            break;
        case SpaceModel::Wuppcf:
            out.grid = wuppcf_grid(s, std::nullopt, spec, mp.crsv);
            out.scalar = team_control_summary(out.grid).mean;
            break;
        case SpaceModel::Obso: {
            ObsoResult r = obso_surface(s, spec, sport, mp.obso);
            out.grid = std::move(r.field);
            out.scalar = r.total;
            break;
        }
        case SpaceModel::Bimos: {
            BimosResult r = bimos_surface(s, spec, sport, mp.pbcf, mp.obso.score);
            out.grid = std::move(r.field);
            out.scalar = r.total;
            break;
        }
    }
    return out;
}

namespace detail {

inline std::string grids_csv(const std::vector<FrameOutput>& frames) {
    std::ostringstream o;
    o << "frame,cx,cy,attack,defend\n";
    for (const auto& f : frames) {
        const auto& g = f.grid;
        for (std::size_t c = 0; c < g.size(); ++c) {
            const Vec2 p = g.spec.center(c);
            o << g.frame_index << ',' << csv::format_double(p.x) << ',' << csv::format_double(p.y) << ','
              << csv::format_double(g.attack[c]) << ',' << csv::format_double(g.defend[c]) << '\n';
        }
    }
    return o.str();
}

// The play is the stall around the initiation frame: same possession, same holder.
inline Play play_for(const SpaceDataset& ds, std::size_t initiation) {
    auto [a, b] = ds.possession_span(initiation);
    const auto holder = ds.holder(initiation);
    if (!holder) throw InputError("initiation frame has no disc holder");
    auto same = [&](std::size_t f) {
        const auto h = ds.holder(f);
        return h && h->team == holder->team && h->index == holder->index;
    };
    std::size_t lo = initiation, hi = initiation + 1;
    while (lo > a && same(lo - 1)) --lo;
    while (hi < b && same(hi)) ++hi;
    a = lo;
    b = hi;
    Play play;
    play.sample_rate = ds.config().sample_rate;
    play.initiation = initiation - a;
    for (std::size_t f = a; f < b; ++f) play.frames.push_back(game_state(ds, f));
    return play;
}

}  // namespace detail

// Computes one match and writes its artifacts under out_dir/<id>/. Returns the manifest lines.
inline std::vector<ManifestEntry> process_match(const MatchInput& m, const RunConfig& rc, std::ostream& log) {
    const SportConfig sport = SportConfig::for_sport(rc.sport);
    const ProviderSpec provider = ProviderSpec::lookup(rc.provider);
    const ModelParams mp = model_params(rc, sport);
    const GridSpec spec = rc.grid ? GridSpec::for_field(sport, rc.grid->first, rc.grid->second) : GridSpec::default_for(sport);
    const SpaceDataset ds = load_match(m, sport, provider);

    const long n = static_cast<long>(ds.size());
    const long first = std::min(rc.frames.first, n);
    const long last = rc.frames.last < 0 ? n : std::min(rc.frames.last, n);
    std::vector<std::size_t> selected;
    for (long f = first; f < last; f += rc.frame_stride) selected.push_back(static_cast<std::size_t>(f));

    std::vector<std::optional<FrameOutput>> results(selected.size());
    std::vector<std::string> errors(selected.size());
    parallel_for(selected.size(), rc.jobs, [&](std::size_t i) {
        try {
            results[i] = compute_frame(game_state(ds, selected[i]), rc.model, spec, sport, mp);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    std::vector<FrameOutput> frames;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (results[i]) frames.push_back(std::move(*results[i]));
        else {
            ++skipped;
            log << m.id << ": frame " << selected[i] << " skipped: " << errors[i] << '\n';
        }
    }
    if (frames.empty()) throw InputError("no frame could be computed");

    const std::string model_id(to_string(rc.model));
    EvaluationReport report;
    report.model = model_id;
    report.params_hash = frames.front().grid.params_hash;
    report.metrics["frames_computed"] = static_cast<double>(frames.size());
    report.metrics["frames_skipped"] = static_cast<double>(skipped);
    std::vector<double> frame_idx, scalar, ratio;
    std::size_t not_converged = 0;
    for (const auto& f : frames) {
        frame_idx.push_back(static_cast<double>(f.grid.frame_index));
        scalar.push_back(f.scalar);
        ratio.push_back(high_control_ratio(f.grid, std::clamp(rc.ratio_tau, 0.0, 1.0)));
        not_converged += f.grid.count_flag(kCellNotConverged);
    }
    report.series["frame"] = frame_idx;
    report.series[rc.model == SpaceModel::Obso || rc.model == SpaceModel::Bimos ? "total" : "mean_control"] = scalar;
    report.metrics["cells_not_converged"] = static_cast<double>(not_converged);
    if (rc.model == SpaceModel::Ppcf || rc.model == SpaceModel::Wuppcf) {
        report.series["high_control_ratio"] = ratio;
        const RatioSeries rs = ratio_series(ratio, sport.sample_rate / rc.frame_stride, {rc.ratio_delta, 0.4});
        report.series["ratio_buckets"] = rs.values;
        report.metrics["ratio_peak"] = rs.peak;
        report.metrics["ratio_time_above"] = rs.time_above;
        if (std::find(rs.partial.begin(), rs.partial.end(), true) != rs.partial.end())
            report.flags.push_back("trailing ratio bucket is partial");
    }
    if (rc.model == SpaceModel::Bimos) report.flags.push_back("bimos total is the per-cell mean");

    if (rc.receiver) {
        const auto init = static_cast<std::size_t>(*rc.initiation_frame);
        if (init >= ds.size()) throw RangeError("initiation frame outside the match");
        const auto team = ds.possession(init);
        if (!team) throw InputError("initiation frame has no possession label");
        const auto ref = parse_player_ref(*rc.receiver, team);
        if (!ref || ref->team != *team) throw InputError("receiver '" + *rc.receiver + "' is not on the attacking team");
        const Play play = detail::play_for(ds, init);
        CrsvParams cp = mp.crsv;
        cp.jobs = rc.jobs;
        const TimingResult t = v_timing(play, static_cast<std::size_t>(ref->index), cp.weights.xi_range, spec, cp);
        report.metrics["v_timing"] = t.v_timing;
        report.metrics["best_alternative_xi"] = t.best_alternative;
        report.scenarios = t.scenarios;
        for (int xi : t.skipped) report.flags.push_back("xi " + std::to_string(xi) + " outside the play");
    }

    const fs::path dir = fs::path(rc.out_path) / m.id;
    fs::create_directories(dir);
    std::vector<ManifestEntry> entries;
    auto emit = [&](const std::string& name, const std::string& bytes) {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("failed writing '" + p.string() + "'");
        entries.push_back({m.id, model_id, (fs::path(m.id) / name).generic_string(), crc32_of(bytes)});
    };
    emit(model_id + "_grids.csv", detail::grids_csv(frames));
    emit(model_id + "_report.json", format_report(report));
    if (rc.render) {
        for (const auto& f : frames) {
            RenderStyle style;
            if (rc.model == SpaceModel::Obso || rc.model == SpaceModel::Bimos) {
                const auto mx = *std::max_element(f.grid.attack.begin(), f.grid.attack.end());
                style.value_min = -mx;
                style.value_max = mx > 0.0 ? mx : 1.0;
            }
            const auto png = encode_png(render_heatmap(f.grid, f.state, sport, style), heatmap_metadata(f.grid));
            emit(model_id + "_frame" + std::to_string(f.grid.frame_index) + ".png",
                 std::string(png.begin(), png.end()));
        }
    }
    return entries;
}

inline std::string format_manifest(const std::vector<ManifestEntry>& entries) {
    std::ostringstream o;
    o << "input_id,model,path,crc32\n";
    for (const auto& e : entries)
        o << csv::quote(e.input_id) << ',' << e.model << ',' << csv::quote(e.path) << ',' << crc_hex(e.crc32) << '\n';
    return o.str();
}

// Runs every input match, logging and skipping failed items, then writes out_path/manifest.csv.
inline BatchResult run_batch(const RunConfig& rc, std::ostream& log) {
    rc.validate();
    BatchResult result;
    const auto inputs = discover_inputs(rc, result.failures);
    result.items = inputs.size() + result.failures.size();
    for (const auto& f : result.failures) log << f.input_id << ": failed: " << f.message << '\n';
    for (const auto& m : inputs) {
        try {
            auto entries = process_match(m, rc, log);
            result.manifest.insert(result.manifest.end(), entries.begin(), entries.end());
        } catch (const Error& e) {
            log << m.id << ": failed: " << e.what() << '\n';
            result.failures.push_back({m.id, e.what()});
        } catch (const fs::filesystem_error& e) {
            log << m.id << ": failed: " << e.what() << '\n';
            result.failures.push_back({m.id, e.what()});
        }
    }
    std::sort(result.manifest.begin(), result.manifest.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return std::tie(a.input_id, a.path) < std::tie(b.input_id, b.path); });
    fs::create_directories(rc.out_path);
    std::ofstream out(fs::path(rc.out_path) / "manifest.csv", std::ios::binary);
    if (!out) throw IoError("cannot write the manifest");
    out << format_manifest(result.manifest);
    return result;
}

}  // namespace spacefield
