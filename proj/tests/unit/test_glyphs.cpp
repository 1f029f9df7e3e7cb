#include <doctest.h>

#include <string>

#include "timelinekit/errors.hpp"
#include "timelinekit/glyphs.hpp"

using namespace timelinekit;
using namespace timelinekit::glyphs;

TEST_SUITE("glyphs") {

TEST_CASE("font glyph coverage") {
    for (char c = 'A'; c <= 'Z'; ++c) CHECK(font_has_glyph(c));
    for (char c = '0'; c <= '9'; ++c) CHECK(font_has_glyph(c));
    CHECK(font_has_glyph(' '));
    CHECK(font_has_glyph('.'));
    CHECK(font_has_glyph('-'));
}

TEST_CASE("text metrics compose from cell and spacing") {
    for (int size : {7, 10, 14}) {
        int cell = font_cell_width(size);
        int gap = font_spacing(size);
        CHECK(font_advance(size) == cell + gap);
        CHECK(measure_text_width("A", size) == cell);
        CHECK(measure_text_width("AB", size) == 2 * cell + gap);
        CHECK(measure_text_width("ABC", size) == 3 * cell + 2 * gap);
        CHECK(measure_text_width("", size) == 0);
    }
}

TEST_CASE("full-height glyphs recover the font size from pixels") {
    // Digits and uppercase letters span all 7 font rows, so their rendered
    // ink extent equals the requested pixel size exactly.
    for (int size : {7, 10, 14, 21}) {
        for (const char* s : {"5", "A", "1900"}) {
            TextRaster r = rasterize_text(s, size);
            REQUIRE(r.has_ink);
            CHECK(r.ink_height() == size);
            CHECK(r.mask.height == size);
            CHECK(r.mask.width == measure_text_width(s, size));
            CHECK(r.ink_width() <= r.mask.width);
        }
    }
}

TEST_CASE("tiny or empty text has no ink") {
    CHECK_FALSE(rasterize_text("", 14).has_ink);
    CHECK_FALSE(rasterize_text("A", 2).has_ink);
}

TEST_CASE("rasterization is deterministic") {
    TextRaster a = rasterize_text("EVENT 3", 12);
    TextRaster b = rasterize_text("EVENT 3", 12);
    CHECK(a.mask == b.mask);
}

TEST_CASE("marks touch all four edges") {
    for (MarkShape s : all_mark_shapes()) {
        for (auto [w, h] : {std::pair{12, 8}, std::pair{9, 9}, std::pair{20, 6}}) {
            PixelMask m = rasterize_mark(s, w, h);
            REQUIRE(m.popcount() > 0);
            bool top = false, bottom = false, left = false, right = false;
            for (int x = 0; x < w; ++x) {
                top |= m.at(x, 0) != 0;
                bottom |= m.at(x, h - 1) != 0;
            }
            for (int y = 0; y < h; ++y) {
                left |= m.at(0, y) != 0;
                right |= m.at(w - 1, y) != 0;
            }
            CHECK(top);
            CHECK(bottom);
            CHECK(left);
            CHECK(right);
        }
    }
}

TEST_CASE("rect mark fills its box and circle is symmetric") {
    CHECK(rasterize_mark(MarkShape::Rect, 5, 4).popcount() == 20);
    PixelMask c = rasterize_mark(MarkShape::Circle, 11, 11);
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x) CHECK(c.at(x, y) == c.at(10 - x, y));
}

TEST_CASE("icon library") {
    auto names = icon_names();
    REQUIRE(!names.empty());
    for (const auto& n : names) {
        CHECK(is_icon(n));
        PixelMask m = rasterize_icon(n, 16, 16);
        CHECK(m.popcount() > 0);
        CHECK(m.width == 16);
        CHECK(m.height == 16);
        CHECK(!icon_polygons(n).empty());
        // Same name, same pixels.
        CHECK(rasterize_icon(n, 16, 16) == m);
    }
    CHECK_FALSE(is_icon("no-such-icon"));
    CHECK_THROWS_AS(rasterize_icon("no-such-icon", 16, 16), DomainError);
    CHECK_THROWS_AS(icon_polygons("no-such-icon"), DomainError);
}

}  // TEST_SUITE
