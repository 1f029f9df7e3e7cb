#include "timelinekit/glyphs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>

#include "timelinekit/errors.hpp"

namespace timelinekit {
namespace glyphs {

namespace {

// 5x7 glyphs, one byte per row, bit 4 = leftmost column.
struct FontGlyph {
    char ch;
    std::uint8_t rows[7];
};

const FontGlyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x1B, 0x11}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'a', {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F}},
    {'b', {0x10, 0x10, 0x1E, 0x11, 0x11, 0x11, 0x1E}},
    {'c', {0x00, 0x00, 0x0E, 0x11, 0x10, 0x11, 0x0E}},
    {'d', {0x01, 0x01, 0x0F, 0x11, 0x11, 0x11, 0x0F}},
    {'e', {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E}},
    {'f', {0x06, 0x08, 0x1C, 0x08, 0x08, 0x08, 0x08}},
    {'g', {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x0E}},
    {'h', {0x10, 0x10, 0x1E, 0x11, 0x11, 0x11, 0x11}},
    {'i', {0x04, 0x00, 0x0C, 0x04, 0x04, 0x04, 0x0E}},
    {'j', {0x02, 0x00, 0x06, 0x02, 0x02, 0x12, 0x0C}},
    {'k', {0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12}},
    {'l', {0x0C, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'m', {0x00, 0x00, 0x1A, 0x15, 0x15, 0x15, 0x15}},
    {'n', {0x00, 0x00, 0x1E, 0x11, 0x11, 0x11, 0x11}},
    {'o', {0x00, 0x00, 0x0E, 0x11, 0x11, 0x11, 0x0E}},
    {'p', {0x00, 0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10}},
    {'q', {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x01}},
    {'r', {0x00, 0x00, 0x16, 0x19, 0x10, 0x10, 0x10}},
    {'s', {0x00, 0x00, 0x0F, 0x10, 0x0E, 0x01, 0x1E}},
    {'t', {0x08, 0x08, 0x1C, 0x08, 0x08, 0x09, 0x06}},
    {'u', {0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0D}},
    {'v', {0x00, 0x00, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'w', {0x00, 0x00, 0x11, 0x11, 0x15, 0x15, 0x0A}},
    {'x', {0x00, 0x00, 0x11, 0x0A, 0x04, 0x0A, 0x11}},
    {'y', {0x00, 0x00, 0x11, 0x11, 0x0F, 0x01, 0x0E}},
    {'z', {0x00, 0x00, 0x1F, 0x02, 0x04, 0x08, 0x1F}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}},
    {'-', {0x00, 0x00, 0x00, 0x0E, 0x00, 0x00, 0x00}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'\'', {0x06, 0x04, 0x08, 0x00, 0x00, 0x00, 0x00}},
    {'/', {0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10}},
    {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
    {'!', {0x04, 0x04, 0x04, 0x04, 0x04, 0x00, 0x04}},
    {'?', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x00, 0x04}},
    {'&', {0x0C, 0x12, 0x14, 0x08, 0x15, 0x12, 0x0D}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'%', {0x19, 0x19, 0x02, 0x04, 0x08, 0x13, 0x13}},
};

const FontGlyph* find_glyph(char c) {
    for (const FontGlyph& g : kFont)
        if (g.ch == c) return &g;
    return nullptr;
}

}  // namespace

bool font_has_glyph(char c) { return find_glyph(c) != nullptr; }

int font_cell_width(int size_px) {
    return std::max(1, static_cast<int>(std::lround(5.0 * size_px / 7.0)));
}

int font_spacing(int size_px) {
    return std::max(1, static_cast<int>(std::lround(size_px / 7.0)));
}

int font_advance(int size_px) { return font_cell_width(size_px) + font_spacing(size_px); }

int measure_text_width(const std::string& text, int size_px) {
    if (text.empty()) return 0;
    int n = static_cast<int>(text.size());
    return n * font_cell_width(size_px) + (n - 1) * font_spacing(size_px);
}

TextRaster rasterize_text(const std::string& text, int size_px) {
    TextRaster out;
    if (text.empty() || size_px < 3) {
        out.mask = PixelMask(std::max(0, measure_text_width(text, std::max(size_px, 0))),
                             std::max(size_px, 0));
        return out;
    }
    const int F = size_px;
    const int W = font_cell_width(F);
    const int adv = font_advance(F);
    out.mask = PixelMask(measure_text_width(text, F), F);
    out.ink_left = out.mask.width;
    out.ink_top = out.mask.height;

    // row r of the 5x7 grid covers image rows [floor(r*F/7), floor((r+1)*F/7))
    auto row_edge = [&](int r) { return r * F / 7; };
    auto col_edge = [&](int c) { return c * W / 5; };

    for (size_t idx = 0; idx < text.size(); ++idx) {
        const FontGlyph* g = find_glyph(text[idx]);
        if (!g) g = find_glyph('?');
        int x0 = static_cast<int>(idx) * adv;
        for (int r = 0; r < 7; ++r) {
            for (int c = 0; c < 5; ++c) {
                if (!(g->rows[r] & (1 << (4 - c)))) continue;
                for (int y = row_edge(r); y < row_edge(r + 1); ++y) {
                    for (int x = x0 + col_edge(c); x < x0 + col_edge(c + 1); ++x) {
                        out.mask.set(x, y, 1);
                        out.has_ink = true;
                        out.ink_left = std::min(out.ink_left, x);
                        out.ink_top = std::min(out.ink_top, y);
                        out.ink_right = std::max(out.ink_right, x + 1);
                        out.ink_bottom = std::max(out.ink_bottom, y + 1);
                    }
                }
            }
        }
    }
    if (!out.has_ink) {
        out.ink_left = out.ink_top = out.ink_right = out.ink_bottom = 0;
    }
    return out;
}

// ---- Marks ------------------------------------------------------------------

const char* to_string(MarkShape s) {
    switch (s) {
        case MarkShape::Rect: return "rect";
        case MarkShape::Circle: return "circle";
        case MarkShape::Diamond: return "diamond";
        case MarkShape::Capsule: return "capsule";
    }
    return "?";
}

std::optional<MarkShape> parse_mark_shape(const std::string& s) {
    for (MarkShape m : all_mark_shapes())
        if (s == to_string(m)) return m;
    return std::nullopt;
}

std::vector<MarkShape> all_mark_shapes() {
    return {MarkShape::Rect, MarkShape::Circle, MarkShape::Diamond, MarkShape::Capsule};
}

namespace {

template <typename Inside>
PixelMask rasterize_coverage(int w, int h, Inside inside) {
    PixelMask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int hits = 0;
            for (int sy = 0; sy < 4; ++sy)
                for (int sx = 0; sx < 4; ++sx)
                    if (inside(x + (sx + 0.5) / 4.0, y + (sy + 0.5) / 4.0)) ++hits;
            if (hits >= 8) m.set(x, y, 1);
        }
    }
    return m;
}

}  // namespace

PixelMask rasterize_mark(MarkShape s, int w, int h) {
    if (w <= 0 || h <= 0) throw DomainError("mark size must be positive");
    const double cx = w / 2.0, cy = h / 2.0;
    const double rx = w / 2.0, ry = h / 2.0;
    switch (s) {
        case MarkShape::Rect:
            return PixelMask(w, h, 1);
        case MarkShape::Circle:
            return rasterize_coverage(w, h, [&](double px, double py) {
                double dx = (px - cx) / rx, dy = (py - cy) / ry;
                return dx * dx + dy * dy <= 1.0;
            });
        case MarkShape::Diamond:
            return rasterize_coverage(w, h, [&](double px, double py) {
                return std::abs(px - cx) / rx + std::abs(py - cy) / ry <= 1.0;
            });
        case MarkShape::Capsule: {
            double r = std::min(w, h) / 2.0;
            // axis endpoints of the capsule's spine
            double ax = (w >= h) ? r : cx, ay = (w >= h) ? cy : r;
            double bx = (w >= h) ? w - r : cx, by = (w >= h) ? cy : h - r;
            return rasterize_coverage(w, h, [&](double px, double py) {
                double vx = bx - ax, vy = by - ay;
                double len2 = vx * vx + vy * vy;
                double t = len2 > 0 ? std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0)
                                    : 0.0;
                double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
                return dx * dx + dy * dy <= r * r;
            });
        }
    }
    throw DomainError("unknown mark shape");
}

// ---- Icons -------------------------------------------------------------------

namespace {

using Poly = std::vector<std::pair<double, double>>;

Poly regular_polygon(int n, double cx, double cy, double r, double phase) {
    Poly p;
    for (int i = 0; i < n; ++i) {
        double a = phase + 2.0 * std::numbers::pi * i / n;
        p.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
    }
    return p;
}

Poly star_polygon(int points, double cx, double cy, double r_outer, double r_inner, double phase) {
    Poly p;
    for (int i = 0; i < 2 * points; ++i) {
        double a = phase + std::numbers::pi * i / points;
        double r = (i % 2 == 0) ? r_outer : r_inner;
        p.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
    }
    return p;
}

Poly circle_polygon(double cx, double cy, double r, int segs = 40) {
    return regular_polygon(segs, cx, cy, r, 0.0);
}

Poly arc_points(double cx, double cy, double r, double a0, double a1, int segs) {
    Poly p;
    for (int i = 0; i <= segs; ++i) {
        double a = a0 + (a1 - a0) * i / segs;
        p.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
    }
    return p;
}

Poly rect_poly(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

struct IconDef {
    std::string name;
    std::vector<Poly> polys;
};

std::vector<IconDef> build_icons() {
    const double pi = std::numbers::pi;
    std::vector<IconDef> icons;

    icons.push_back({"star", {star_polygon(5, 0.5, 0.5, 0.48, 0.19, -pi / 2)}});
    icons.push_back({"burst", {star_polygon(8, 0.5, 0.5, 0.48, 0.24, -pi / 2)}});
    icons.push_back({"triangle", {{{0.5, 0.05}, {0.95, 0.92}, {0.05, 0.92}}}});
    icons.push_back({"diamond", {{{0.5, 0.03}, {0.93, 0.5}, {0.5, 0.97}, {0.07, 0.5}}}});
    icons.push_back({"hexagon", {regular_polygon(6, 0.5, 0.5, 0.46, 0.0)}});
    icons.push_back({"pentagon", {regular_polygon(5, 0.5, 0.52, 0.46, -pi / 2)}});

    {  // heart: two lobes + point, sampled parametrically
        Poly p;
        for (int i = 0; i <= 60; ++i) {
            double t = pi * i / 60.0;  // t over [0, pi] traces the upper lobes
            double x = 16 * std::pow(std::sin(t), 3.0);
            double y = 13 * std::cos(t) - 5 * std::cos(2 * t) - 2 * std::cos(3 * t) -
                       std::cos(4 * t);
            p.emplace_back(0.5 + x / 36.0, 0.42 - y / 36.0);
        }
        for (int i = 60; i >= 0; --i) {
            double t = -pi * i / 60.0;
            double x = 16 * std::pow(std::sin(t), 3.0);
            double y = 13 * std::cos(t) - 5 * std::cos(2 * t) - 2 * std::cos(3 * t) -
                       std::cos(4 * t);
            p.emplace_back(0.5 + x / 36.0, 0.42 - y / 36.0);
        }
        icons.push_back({"heart", {p}});
    }

    icons.push_back(
        {"house",
         {{{0.5, 0.05}, {0.95, 0.45}, {0.85, 0.45}, {0.85, 0.95}, {0.15, 0.95}, {0.15, 0.45}, {0.05, 0.45}}}});
    icons.push_back(
        {"flag",
         {rect_poly(0.15, 0.05, 0.23, 0.95),
          {{0.23, 0.08}, {0.88, 0.2}, {0.23, 0.42}}}});
    icons.push_back(
        {"bolt",
         {{{0.6, 0.03}, {0.25, 0.55}, {0.47, 0.55}, {0.38, 0.97}, {0.78, 0.4}, {0.55, 0.4}}}});

    {  // drop: circle bottom + pointed top
        Poly p = arc_points(0.5, 0.62, 0.31, pi * -0.35, pi * 1.35, 40);
        p.emplace_back(0.5, 0.02);
        icons.push_back({"drop", {p}});
    }

    {  // gear: toothed ring with a hole
        Poly outer;
        const int teeth = 8;
        for (int i = 0; i < teeth * 4; ++i) {
            double seg = i / 4.0;
            double a = 2 * pi * seg / teeth;
            int phase = i % 4;
            double r = (phase == 0 || phase == 3) ? 0.34 : 0.47;
            outer.emplace_back(0.5 + r * std::cos(a), 0.5 + r * std::sin(a));
        }
        icons.push_back({"gear", {outer, circle_polygon(0.5, 0.5, 0.13)}});
    }

    icons.push_back({"target",
                     {circle_polygon(0.5, 0.5, 0.47), circle_polygon(0.5, 0.5, 0.31),
                      circle_polygon(0.5, 0.5, 0.15)}});
    icons.push_back({"ring", {circle_polygon(0.5, 0.5, 0.46), circle_polygon(0.5, 0.5, 0.26)}});

    {  // pin: balloon outline with a tip at the bottom
        Poly p = arc_points(0.5, 0.38, 0.32, pi * 0.78, pi * 2.22, 44);
        p.emplace_back(0.5, 0.97);
        icons.push_back({"pin", {p}});
    }

    icons.push_back(
        {"check",
         {{{0.08, 0.55}, {0.2, 0.42}, {0.38, 0.6}, {0.78, 0.12}, {0.92, 0.24}, {0.4, 0.88}}}});
    icons.push_back({"cross",
                     {{{0.2, 0.08}, {0.5, 0.38}, {0.8, 0.08}, {0.92, 0.2}, {0.62, 0.5},
                       {0.92, 0.8}, {0.8, 0.92}, {0.5, 0.62}, {0.2, 0.92}, {0.08, 0.8},
                       {0.38, 0.5}, {0.08, 0.2}}}});
    icons.push_back({"plus",
                     {{{0.38, 0.05}, {0.62, 0.05}, {0.62, 0.38}, {0.95, 0.38}, {0.95, 0.62},
                       {0.62, 0.62}, {0.62, 0.95}, {0.38, 0.95}, {0.38, 0.62}, {0.05, 0.62},
                       {0.05, 0.38}, {0.38, 0.38}}}});
    icons.push_back({"arrow_right",
                     {{{0.05, 0.38}, {0.55, 0.38}, {0.55, 0.15}, {0.95, 0.5}, {0.55, 0.85},
                       {0.55, 0.62}, {0.05, 0.62}}}});
    icons.push_back({"arrow_up",
                     {{{0.38, 0.95}, {0.38, 0.45}, {0.15, 0.45}, {0.5, 0.05}, {0.85, 0.45},
                       {0.62, 0.45}, {0.62, 0.95}}}});
    icons.push_back({"hourglass",
                     {{{0.15, 0.05}, {0.85, 0.05}, {0.52, 0.5}, {0.85, 0.95}, {0.15, 0.95},
                       {0.48, 0.5}}}});

    {  // moon: crescent from two arcs
        Poly p = arc_points(0.5, 0.5, 0.45, pi * 0.32, pi * 1.68, 40);
        Poly inner = arc_points(0.66, 0.5, 0.38, pi * 1.6, pi * 0.4, 40);
        p.insert(p.end(), inner.begin(), inner.end());
        icons.push_back({"moon", {p}});
    }

    {  // flower: petal rosette
        Poly p;
        for (int i = 0; i <= 120; ++i) {
            double a = 2 * pi * i / 120.0;
            double r = 0.2 + 0.26 * std::abs(std::sin(3 * a));
            p.emplace_back(0.5 + r * std::cos(a), 0.5 + r * std::sin(a));
        }
        icons.push_back({"flower", {p}});
    }

    icons.push_back({"calendar",
                     {rect_poly(0.08, 0.18, 0.92, 0.95), rect_poly(0.22, 0.05, 0.32, 0.18),
                      rect_poly(0.68, 0.05, 0.78, 0.18)}});
    icons.push_back({"book",
                     {{{0.08, 0.12}, {0.46, 0.2}, {0.46, 0.92}, {0.08, 0.84}},
                      {{0.54, 0.2}, {0.92, 0.12}, {0.92, 0.84}, {0.54, 0.92}}}});

    return icons;
}

const std::vector<IconDef>& icon_table() {
    static const std::vector<IconDef> table = build_icons();
    return table;
}

const IconDef* find_icon(const std::string& name) {
    for (const IconDef& d : icon_table())
        if (d.name == name) return &d;
    return nullptr;
}

// Even-odd rule across all rings of the icon.
bool point_in_polys(const std::vector<Poly>& polys, double px, double py) {
    bool inside = false;
    for (const Poly& poly : polys) {
        size_t n = poly.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            double xi = poly[i].first, yi = poly[i].second;
            double xj = poly[j].first, yj = poly[j].second;
            if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi)
                inside = !inside;
        }
    }
    return inside;
}

}  // namespace

std::vector<std::string> icon_names() {
    std::vector<std::string> names;
    for (const IconDef& d : icon_table()) names.push_back(d.name);
    return names;
}

bool is_icon(const std::string& name) { return find_icon(name) != nullptr; }

PixelMask rasterize_icon(const std::string& name, int w, int h) {
    const IconDef* def = find_icon(name);
    if (!def) throw DomainError("unknown icon glyph: " + name);
    if (w <= 0 || h <= 0) throw DomainError("icon size must be positive");
    return rasterize_coverage(w, h, [&](double px, double py) {
        return point_in_polys(def->polys, px / w, py / h);
    });
}

std::vector<std::vector<std::pair<double, double>>> icon_polygons(const std::string& name) {
    const IconDef* def = find_icon(name);
    if (!def) throw DomainError("unknown icon glyph: " + name);
    return def->polys;
}

}  // namespace glyphs
}  // namespace timelinekit
