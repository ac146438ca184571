#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spacefield/crsv.hpp"
#include "spacefield/errors.hpp"
#include "spacefield/grid.hpp"

namespace spacefield {

// Fraction of unmasked cells whose attacker value is at least tau.
inline double high_control_ratio(const ControlGrid& grid, double tau = 0.7) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ParameterError("tau must lie in [0, 1]");
    std::size_t cells = 0, above = 0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (grid.masked(c)) continue;
        ++cells;
        if (grid.attack[c] >= tau) ++above;
    }
    if (cells == 0) throw InputError("grid has no unmasked cells");
    return static_cast<double>(above) / static_cast<double>(cells);
}

struct RatioSeries {
    std::string possession_id;
    std::vector<double> timestamps;  // bucket start times, s, relative to the first frame
    std::vector<double> values;      // bucket means
    std::vector<bool> partial;       // bucket shorter than delta
    double peak = 0.0;
    double time_above = 0.0;  // s at frame resolution with ratio >= time_above_threshold
    double delta = 5.0;
};

struct RatioSeriesParams {
    double delta = 5.0;                 // s
    double time_above_threshold = 0.4;  // applied to the per-frame ratio
};

// Buckets per-frame ratios into consecutive delta-second windows starting at the first frame.
// Frame k (time k / rate) belongs to bucket floor(k / round(delta * rate)).
inline RatioSeries ratio_series(const std::vector<double>& frame_ratios, double sample_rate,
                                const RatioSeriesParams& p = {}, std::string possession_id = {}) {
    if (frame_ratios.empty()) throw InputError("possession has no frames");
    if (!(sample_rate > 0.0) || !(p.delta > 0.0)) throw ParameterError("sample rate and delta must be > 0");
    const auto per_bucket = static_cast<std::size_t>(std::max(1L, std::lround(p.delta * sample_rate)));
    RatioSeries rs;
    rs.possession_id = std::move(possession_id);
    rs.delta = p.delta;
    for (std::size_t first = 0; first < frame_ratios.size(); first += per_bucket) {
        const std::size_t last = std::min(frame_ratios.size(), first + per_bucket);
        double sum = 0.0;
        for (std::size_t k = first; k < last; ++k) sum += frame_ratios[k];
        rs.timestamps.push_back(static_cast<double>(first) / sample_rate);
        rs.values.push_back(sum / static_cast<double>(last - first));
        rs.partial.push_back(last - first < per_bucket);
    }
    rs.peak = *std::max_element(rs.values.begin(), rs.values.end());
    const auto above = std::count_if(frame_ratios.begin(), frame_ratios.end(),
                                     [&](double r) { return r >= p.time_above_threshold; });
    rs.time_above = static_cast<double>(above) / sample_rate;
    return rs;
}

inline std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InputError("pearson: length mismatch");
    if (a.size() < 2) return std::nullopt;
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

enum Indicator : std::size_t { kObso = 0, kBimos = 1, kShots = 2, kGoals = 3 };
inline constexpr std::array<const char*, 4> kIndicatorNames{"OBSO", "BIMOS", "Shots", "Goals"};

struct TeamMatchSeries {
    std::string team;
    std::array<std::vector<double>, 4> values;  // per indicator, matches in chronological order

    std::size_t matches() const { return values[0].size(); }
};

enum class CorrelationPooling { Pooled, PerTeamMean };

// entries[a][b] for a <= b: Pearson r between indicator a at match i and indicator b at match i+1.
// Lower triangle and undefined (zero-variance) entries are empty.
struct CorrelationTable {
    std::array<std::array<std::optional<double>, 4>, 4> entries{};
    std::size_t pairs = 0;
};

inline CorrelationTable lag_correlation_table(const std::vector<TeamMatchSeries>& teams,
                                              CorrelationPooling pooling = CorrelationPooling::Pooled) {
    if (teams.empty()) throw InputError("no teams");
    for (const auto& t : teams) {
        for (const auto& v : t.values)
            if (v.size() != t.matches()) throw InputError("team '" + t.team + "': indicator lengths differ");
        if (t.matches() < 2) throw InputError("team '" + t.team + "' has fewer than 2 matches");
    }
    CorrelationTable table;
    for (const auto& t : teams) table.pairs += t.matches() - 1;
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a; b < 4; ++b) {
            if (pooling == CorrelationPooling::Pooled) {
                std::vector<double> x, y;
                for (const auto& t : teams)
                    for (std::size_t i = 0; i + 1 < t.matches(); ++i) {
                        x.push_back(t.values[a][i]);
                        y.push_back(t.values[b][i + 1]);
                    }
                table.entries[a][b] = pearson(x, y);
            } else {
                double sum = 0.0;
                std::size_t defined = 0;
                for (const auto& t : teams) {
                    std::vector<double> x(t.values[a].begin(), t.values[a].end() - 1);
                    std::vector<double> y(t.values[b].begin() + 1, t.values[b].end());
                    if (auto r = pearson(x, y)) {
                        sum += *r;
                        ++defined;
                    }
                }
                if (defined > 0) table.entries[a][b] = sum / static_cast<double>(defined);
            }
        }
    }
    return table;
}

// Mean binary cross-entropy with predictions clipped to [eps, 1 - eps].
inline double log_loss(const std::vector<double>& predicted, const std::vector<int>& outcomes, double eps = 1e-12) {
    if (predicted.size() != outcomes.size()) throw InputError("log_loss: length mismatch");
    if (predicted.empty()) throw InputError("log_loss: no predictions");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (outcomes[i] != 0 && outcomes[i] != 1) throw InputError("log_loss: outcomes must be 0 or 1");
        const double p = std::clamp(predicted[i], eps, 1.0 - eps);
        sum += outcomes[i] ? std::log(p) : std::log1p(-p);
    }
    return -sum / static_cast<double>(predicted.size());
}

struct SequenceMax {
    double value = 0.0;
    std::size_t frame = 0;  // index into the sequence's frames
};

// Largest V_frame over the post-initiation frames of each sequence, for its assigned receiver.
inline std::vector<SequenceMax> max_vframe_per_sequence(const std::vector<Play>& sequences,
                                                        const std::vector<std::size_t>& receivers,
                                                        const GridSpec& spec, const CrsvParams& p) {
    if (sequences.size() != receivers.size()) throw InputError("one receiver per sequence expected");
    std::vector<SequenceMax> out;
    out.reserve(sequences.size());
    for (std::size_t s = 0; s < sequences.size(); ++s) {
        const Play& play = sequences[s];
        if (play.initiation >= play.frames.size()) throw RangeError("sequence has no post-initiation frame");
        const auto series = v_frame_series(play, receivers[s], spec, p, play.initiation);
        const auto it = std::max_element(series.begin(), series.end());
        out.push_back({*it, play.initiation + static_cast<std::size_t>(it - series.begin())});
    }
    return out;
}

}  // namespace spacefield
