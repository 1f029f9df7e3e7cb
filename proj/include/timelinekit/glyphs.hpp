#pragma once

#include <optional>
#include <string>
#include <vector>

#include "timelinekit/geometry.hpp"

namespace timelinekit {
namespace glyphs {

// ---- Bitmap text -----------------------------------------------------------
//
// A 5x7 bitmap font scaled to an exact integer pixel height. Scaling maps
// font row r to image rows [floor(r*F/7), floor((r+1)*F/7)), so a glyph that
// spans all 7 font rows (every digit and uppercase letter does) has an ink
// extent of exactly F pixels. That makes rendered text measurable: the font
// size can be recovered from the pixels alone.

bool font_has_glyph(char c);
int font_cell_width(int size_px);   // width of one glyph cell
int font_spacing(int size_px);      // gap between consecutive cells
int font_advance(int size_px);      // cell + gap
int measure_text_width(const std::string& text, int size_px);

struct TextRaster {
    PixelMask mask;   // em-box extent: measure_text_width x size_px
    bool has_ink = false;
    int ink_left = 0, ink_top = 0;      // tight ink bounds within the mask
    int ink_right = 0, ink_bottom = 0;  // exclusive
    int ink_width() const { return ink_right - ink_left; }
    int ink_height() const { return ink_bottom - ink_top; }
};

// Rasterize a string at the given pixel height. Unsupported characters draw
// as '?'. size_px < 3 or an empty string yields has_ink == false.
TextRaster rasterize_text(const std::string& text, int size_px);

// ---- Mark shapes -----------------------------------------------------------

enum class MarkShape { Rect, Circle, Diamond, Capsule };
const char* to_string(MarkShape s);
std::optional<MarkShape> parse_mark_shape(const std::string& s);
std::vector<MarkShape> all_mark_shapes();

// Binary coverage rasterization (4x4 supersampling, a pixel is set when at
// least half its sample points fall inside the shape). The result always
// touches all four edges of the w x h box.
PixelMask rasterize_mark(MarkShape s, int w, int h);

// ---- Icon glyphs -----------------------------------------------------------
//
// A library of parametric vector pictograms (polygons in the unit square,
// even-odd fill) rasterized with the same coverage rule as marks.

std::vector<std::string> icon_names();
bool is_icon(const std::string& name);
PixelMask rasterize_icon(const std::string& name, int w, int h);  // DomainError if unknown

// The icon's outline polygons (unit square coordinates), for vector output.
std::vector<std::vector<std::pair<double, double>>> icon_polygons(const std::string& name);

}  // namespace glyphs
}  // namespace timelinekit
