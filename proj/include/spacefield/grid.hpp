#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spacefield/csv.hpp"
#include "spacefield/errors.hpp"
#include "spacefield/geometry.hpp"
#include "spacefield/sport.hpp"

namespace spacefield {

// Regular lattice covering [-L/2, L/2] x [-W/2, W/2]. Cells are stored row-major with
// y as the slow index: cell (i, j) lives at j * nx + i.
struct GridSpec {
    int nx = 1;
    int ny = 1;
    double length = 105.0;
    double width = 68.0;
    std::vector<bool> mask;  // true = skipped; empty = no mask

    static GridSpec for_field(const SportConfig& c, int nx, int ny) {
        GridSpec g{nx, ny, c.field_length, c.field_width, {}};
        g.validate();
        return g;
    }

    static GridSpec default_for(const SportConfig& c) {
        switch (c.sport) {
            case Sport::Ultimate: return for_field(c, 55, 25);
            case Sport::Basketball: return for_field(c, 28, 15);
            case Sport::Soccer: break;
        }
        return for_field(c, 50, 32);
    }

    void validate() const {
        if (nx < 1 || ny < 1) throw ConfigError("grid needs nx, ny >= 1");
        if (!(length > 0.0) || !(width > 0.0)) throw ConfigError("grid extent must be positive");
        if (!mask.empty() && mask.size() != size()) throw ConfigError("grid mask size mismatch");
    }

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    double dx() const { return length / nx; }
    double dy() const { return width / ny; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    bool masked(std::size_t cell) const { return !mask.empty() && mask[cell]; }

    // Centers are (k + 1/2 - n/2) * spacing, so the center of cell n-1-k is exactly the
    // negation of the center of cell k.
    double center_x(int i) const { return (i + 0.5 - nx / 2.0) * dx(); }
    double center_y(int j) const { return (j + 0.5 - ny / 2.0) * dy(); }
    Vec2 center(std::size_t cell) const {
        return {center_x(static_cast<int>(cell % nx)), center_y(static_cast<int>(cell / nx))};
    }
    std::size_t mirror_cell(std::size_t cell) const {
        const int i = static_cast<int>(cell % nx), j = static_cast<int>(cell / nx);
        return index(nx - 1 - i, ny - 1 - j);
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum CellFlag : std::uint8_t {
    kCellOk = 0,
    kCellMasked = 1,
    kCellNotConverged = 2,  // total control below 0.99 at the horizon
    kCellDegenerate = 4,    // zero-length delivery
};

// Per-cell attacker and defender probabilities over a GridSpec.
struct ControlGrid {
    GridSpec spec;
    std::vector<double> attack;
    std::vector<double> defend;
    std::vector<std::uint8_t> flags;
    std::size_t frame_index = 0;
    std::string model;
    std::string params_hash;

    ControlGrid() = default;
    explicit ControlGrid(GridSpec g, std::string model_id = {})
        : spec(std::move(g)), attack(spec.size(), 0.0), defend(spec.size(), 0.0),
          flags(spec.size(), kCellOk), model(std::move(model_id)) {
        for (std::size_t c = 0; c < spec.size(); ++c)
            if (spec.masked(c)) flags[c] = kCellMasked;
    }

    std::size_t size() const { return spec.size(); }
    bool masked(std::size_t c) const { return flags[c] & kCellMasked; }
    std::size_t count_flag(CellFlag f) const {
        return static_cast<std::size_t>(std::count_if(flags.begin(), flags.end(), [f](auto v) { return v & f; }));
    }
};

struct ControlSummary {
    double mean = 0.0;
    double max = 0.0;
    double mass = 0.0;  // sum over unmasked cells
    std::size_t cells = 0;
};

inline ControlSummary team_control_summary(const ControlGrid& grid, bool attacking = true) {
    const auto& v = attacking ? grid.attack : grid.defend;
    ControlSummary s;
    s.max = 0.0;
    for (std::size_t c = 0; c < v.size(); ++c) {
        if (grid.masked(c)) continue;
        if (s.cells == 0 || v[c] > s.max) s.max = v[c];
        s.mass += v[c];
        ++s.cells;
    }
    if (s.cells == 0) throw InputError("grid has no unmasked cells");
    s.mean = s.mass / static_cast<double>(s.cells);
    return s;
}

// CSV export: one row per cell, "cx,cy,attack,defend", row-major order.
inline void write_grid_csv(std::ostream& out, const ControlGrid& g) {
    out << "cx,cy,attack,defend\n";
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Vec2 p = g.spec.center(c);
        out << csv::format_double(p.x) << ',' << csv::format_double(p.y) << ','
            << csv::format_double(g.attack[c]) << ',' << csv::format_double(g.defend[c]) << '\n';
    }
}

// Binary export, little-endian: "SPCG", u32 nx, u32 ny, then nx*ny f64 attack values
// followed by nx*ny f64 defend values, each plane row-major.
inline void write_grid_binary(std::ostream& out, const ControlGrid& g) {
    static_assert(std::endian::native == std::endian::little, "binary grid export assumes little-endian host");
    out.write("SPCG", 4);
    const std::uint32_t nx = static_cast<std::uint32_t>(g.spec.nx), ny = static_cast<std::uint32_t>(g.spec.ny);
    out.write(reinterpret_cast<const char*>(&nx), 4);
    out.write(reinterpret_cast<const char*>(&ny), 4);
    out.write(reinterpret_cast<const char*>(g.attack.data()), static_cast<std::streamsize>(g.attack.size() * 8));
    out.write(reinterpret_cast<const char*>(g.defend.data()), static_cast<std::streamsize>(g.defend.size() * 8));
    if (!out) throw IoError("failed writing binary grid");
}

// Reads a binary block written by write_grid_binary. Geometry other than nx, ny is not stored
// and is taken from `like`.
inline ControlGrid read_grid_binary(std::istream& in, GridSpec like) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SPCG", 4) != 0) throw ParseError("not an SPCG grid block");
    std::uint32_t nx = 0, ny = 0;
    in.read(reinterpret_cast<char*>(&nx), 4);
    in.read(reinterpret_cast<char*>(&ny), 4);
    like.nx = static_cast<int>(nx);
    like.ny = static_cast<int>(ny);
    like.mask.clear();
    ControlGrid g(like);
    in.read(reinterpret_cast<char*>(g.attack.data()), static_cast<std::streamsize>(g.size() * 8));
    in.read(reinterpret_cast<char*>(g.defend.data()), static_cast<std::streamsize>(g.size() * 8));
    if (!in) throw ParseError("truncated SPCG grid block");
    return g;
}

}  // namespace spacefield
