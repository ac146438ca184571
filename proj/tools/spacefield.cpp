// spacefield command line: compute space-valuation grids, reports and heatmaps in batch.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spacefield/spacefield.hpp"

using namespace spacefield;

int main(int argc, char** argv) {
    CLI::App app{"Space valuation surfaces for invasion-sport tracking data"};
    std::string model_pos, model, sport, provider, events, home, away, out, grid, frames, receiver, xi, combine;
    long initiation = -1;
    int stride = 0;
    unsigned jobs = 0;
    bool render = false;
    std::vector<std::string> params;

    app.add_option("model", model_pos, "Space model: ppcf, obso, wuppcf or bimos");
    app.add_option("--space-model", model, "Same as the positional model");
    app.add_option("--sport", sport, "ultimate, soccer or basketball");
    app.add_option("--provider", provider, "Coordinate provider id (metric, ufa, statsbomb, ...)");
    app.add_option("--event-data", events, "Event CSV file or directory");
    app.add_option("--tracking-home", home, "Home tracking CSV file or directory");
    app.add_option("--tracking-away", away, "Away tracking CSV file or directory");
    app.add_option("--out-path", out, "Output directory");
    app.add_option("--grid", grid, "Grid size NXxNY");
    app.add_option("--frames", frames, "Frame range a:b (half-open)");
    app.add_option("--frame-stride", stride, "Use every n-th frame");
    app.add_option("--receiver", receiver, "Receiver id for timing analysis, e.g. Home_3");
    app.add_option("--initiation-frame", initiation, "Frame the receiver's run starts");
    app.add_option("--xi-range", xi, "Initiation offsets min:max:step");
    app.add_option("--jobs", jobs, "Worker threads");
    app.add_flag("--render", render, "Write PNG heatmaps");
    app.add_option("--bimos-combine", combine, "mix or max");
    app.add_option("--param", params, "Model parameter override key=value (repeatable)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunConfig rc;
    try {
        rc = config_from_environment();
        if (!model_pos.empty()) rc.model = parse_space_model(model_pos);
        if (!model.empty()) rc.model = parse_space_model(model);
        if (!sport.empty()) rc.sport = parse_sport(sport);
        if (!provider.empty()) rc.provider = provider;
        if (!events.empty()) rc.event_data = events;
        if (!home.empty()) rc.tracking_home = home;
        if (!away.empty()) rc.tracking_away = away;
        if (!out.empty()) rc.out_path = out;
        if (!grid.empty()) rc.grid = parse_grid_size(grid);
        if (!frames.empty()) rc.frames = parse_frame_range(frames);
        if (stride > 0) rc.frame_stride = stride;
        if (!receiver.empty()) rc.receiver = receiver;
        if (initiation >= 0) rc.initiation_frame = initiation;
        if (!xi.empty()) rc.xi_range = parse_xi_range(xi);
        if (jobs > 0) rc.jobs = jobs;
        if (render) rc.render = true;
        if (!combine.empty()) {
            if (combine == "mix") rc.bimos_combine = BimosCombine::Mix;
            else if (combine == "max") rc.bimos_combine = BimosCombine::Max;
            else throw ConfigError("--bimos-combine must be mix or max");
        }
        for (const auto& kv : params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + kv + "'");
            rc.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        }
        rc.validate();
        model_params(rc, SportConfig::for_sport(rc.sport));
    } catch (const std::exception& e) {
        std::cerr << "spacefield: " << e.what() << '\n';
        return 2;
    }

    try {
        const BatchResult r = run_batch(rc, std::cerr);
        std::cerr << r.manifest.size() << " artifacts, " << r.failures.size() << " failed item(s)\n";
        return r.exit_code();
    } catch (const ConfigError& e) {
        std::cerr << "spacefield: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "spacefield: " << e.what() << '\n';
        return 1;
    }
}
