#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <png.h>

#include "spacefield/errors.hpp"
#include "spacefield/game_state.hpp"
#include "spacefield/grid.hpp"
#include "spacefield/sport.hpp"

namespace spacefield {

using Rgb = std::array<std::uint8_t, 3>;

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, top row first

    Rgb at(int x, int y) const {
        const auto o = (static_cast<std::size_t>(y) * width + x) * 3;
        return {rgb[o], rgb[o + 1], rgb[o + 2]};
    }
    void set(int x, int y, Rgb c) {
        const auto o = (static_cast<std::size_t>(y) * width + x) * 3;
        rgb[o] = c[0];
        rgb[o + 1] = c[1];
        rgb[o + 2] = c[2];
    }
};

struct RenderStyle {
    int cell_pixels = 8;  // even, so the image has even dimensions
    int margin = 16;      // px around the field
    double value_min = 0.0;
    double value_max = 1.0;  // colormap midpoint is (min + max) / 2
    double marker_radius = 0.9;  // m
    double ball_radius = 0.5;    // m
    bool draw_players = true;
    Rgb attacker{33, 102, 172};
    Rgb defender{178, 24, 43};
    Rgb neutral{247, 247, 247};
    Rgb outline{40, 40, 40};
    Rgb background{255, 255, 255};
    Rgb ball{250, 200, 0};
};

// Diverging map: value_min -> defender color, midpoint -> neutral, value_max -> attacker color.
inline Rgb diverging_color(double v, const RenderStyle& st) {
    const double mid = 0.5 * (st.value_min + st.value_max);
    const double half = 0.5 * (st.value_max - st.value_min);
    double t = half > 0.0 ? (v - mid) / half : 0.0;
    t = std::clamp(std::isnan(t) ? 0.0 : t, -1.0, 1.0);
    const Rgb& end = t >= 0.0 ? st.attacker : st.defender;
    const double a = std::abs(t);
    Rgb out;
    for (int k = 0; k < 3; ++k)
        out[k] = static_cast<std::uint8_t>(std::lround(st.neutral[k] * (1.0 - a) + end[k] * a));
    return out;
}

// Draws the attacker channel of `grid` over the field with markers from `state`. Pixel and field
// coordinates are both measured from the image center, so a point-mirrored input produces the
// point-mirrored image exactly.
inline Image render_heatmap(const ControlGrid& grid, const GameState& state, const SportConfig& config,
                            const RenderStyle& st = {}) {
    if (std::abs(grid.spec.length - config.field_length) > 1e-9 || std::abs(grid.spec.width - config.field_width) > 1e-9)
        throw GeometryError("grid extent does not match the field geometry");
    if (st.cell_pixels < 2 || st.cell_pixels % 2 != 0) throw ConfigError("cell_pixels must be an even number >= 2");
    if (st.margin < 2) throw ConfigError("margin must be >= 2");
    const int fw = grid.spec.nx * st.cell_pixels, fh = grid.spec.ny * st.cell_pixels;
    Image img{fw + 2 * st.margin, fh + 2 * st.margin, {}};
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    const double sx = fw / config.field_length, sy = fh / config.field_width;
    const double cx = img.width / 2.0, cy = img.height / 2.0;

    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const int fx = x - st.margin, fy = y - st.margin;
            if (fx < 0 || fy < 0 || fx >= fw || fy >= fh) {
                img.set(x, y, st.background);
                continue;
            }
            // Top image row is the +y edge of the field.
            const int i = fx / st.cell_pixels, j = grid.spec.ny - 1 - fy / st.cell_pixels;
            const std::size_t c = grid.spec.index(i, j);
            img.set(x, y, grid.masked(c) ? st.background : diverging_color(grid.attack[c], st));
        }
    }

    // Outline two pixels wide just outside the field, halfway line, end zone lines.
    auto px_rel = [&](int x) { return x + 0.5 - cx; };
    auto py_rel = [&](int y) { return cy - y - 0.5; };
    const double ez = config.endzone_depth > 0.0 ? (config.half_length() - config.endzone_depth) * sx : -1.0;
    for (int y = st.margin - 2; y < st.margin + fh + 2; ++y) {
        for (int x = st.margin - 2; x < st.margin + fw + 2; ++x) {
            const bool border = x < st.margin || y < st.margin || x >= st.margin + fw || y >= st.margin + fh;
            const double ax = std::abs(px_rel(x));
            const bool halfway = ax < 1.0;
            const bool endzone = ez > 0.0 && std::abs(ax - ez) < 0.5;
            if (border || halfway || endzone) img.set(x, y, st.outline);
        }
    }

    auto disc = [&](Vec2 p, double radius_m, Rgb fill) {
        const double ux = p.x * sx, uy = p.y * sy;
        const double r = radius_m * sx;
        const int x0 = std::max(0, static_cast<int>(std::floor(cx + ux - r - 1))),
                  x1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + ux + r + 1)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - uy - r - 1))),
                  y1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy - uy + r + 1)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dx = px_rel(x) - ux, dy = py_rel(y) - uy;
                const double d2 = dx * dx + dy * dy;
                if (d2 <= r * r) img.set(x, y, d2 >= (r - 1.5) * (r - 1.5) ? st.outline : fill);
            }
        }
    };
    if (st.draw_players) {
        for (const auto& p : state.defenders) disc(p.position, st.marker_radius, st.defender);
        for (const auto& p : state.attackers) disc(p.position, st.marker_radius, st.attacker);
    }
    if (state.ball) disc(*state.ball, st.ball_radius, st.ball);
    return img;
}

namespace detail {

inline void png_write_all(png_structp png, png_infop info, const Image& img, std::vector<png_text>& chunks,
                          std::vector<std::uint8_t>& out) {
    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t n) {
            auto* v = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
            v->insert(v->end(), data, data + n);
        },
        [](png_structp) {});
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 9);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
    if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(img.rgb.data() + static_cast<std::size_t>(y) * img.width * 3));
    png_write_end(png, info);
}

// libpng reports errors by longjmp; keep the jump target free of objects with destructors.
[[gnu::noinline]] inline bool png_write_guarded(png_structp png, png_infop info, const Image& img, std::vector<png_text>& chunks,
                              std::vector<std::uint8_t>& out) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_write_all(png, info, img, chunks, out);
    return true;
}

}  // namespace detail

// Deterministic PNG (8-bit RGB, fixed compression, no timestamp) with tEXt metadata chunks in
// the given order.
inline std::vector<std::uint8_t> encode_png(const Image& img,
                                            const std::vector<std::pair<std::string, std::string>>& text = {}) {
    if (img.width <= 0 || img.height <= 0 || img.rgb.size() != static_cast<std::size_t>(img.width) * img.height * 3)
        throw GeometryError("image buffer does not match its dimensions");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: cannot create writer");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: cannot create info");
    }
    std::vector<std::uint8_t> out;
    std::vector<png_text> chunks(text.size());
    for (std::size_t k = 0; k < text.size(); ++k) {
        chunks[k].compression = PNG_TEXT_COMPRESSION_NONE;
        chunks[k].key = const_cast<char*>(text[k].first.c_str());
        chunks[k].text = const_cast<char*>(text[k].second.c_str());
        chunks[k].text_length = text[k].second.size();
    }
    const bool ok = detail::png_write_guarded(png, info, img, chunks, out);
    png_destroy_write_struct(&png, &info);
    if (!ok) throw IoError("png: encoding failed");
    return out;
}

inline std::vector<std::pair<std::string, std::string>> heatmap_metadata(const ControlGrid& grid) {
    return {{"model", grid.model}, {"frame", std::to_string(grid.frame_index)}, {"params_hash", grid.params_hash}};
}

inline void write_png(const std::string& path, const Image& img,
                      const std::vector<std::pair<std::string, std::string>>& text = {}) {
    const auto bytes = encode_png(img, text);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace spacefield
