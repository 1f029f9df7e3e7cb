#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "timelinekit/errors.hpp"
#include "timelinekit/geometry.hpp"
#include "timelinekit/rng.hpp"

using namespace timelinekit;

namespace {

BBox bx(int top, int left, int w, int h) { return BBox{top, left, w, h}; }

// Brute-force pixel-set oracle for IoU and the bbox union.
double pixel_iou(const BBox& a, const BBox& b) {
    std::set<std::pair<int, int>> pa, pb;
    for (int y = a.top; y < a.bottom(); ++y)
        for (int x = a.left; x < a.right(); ++x) pa.insert({x, y});
    for (int y = b.top; y < b.bottom(); ++y)
        for (int x = b.left; x < b.right(); ++x) pb.insert({x, y});
    std::size_t inter = 0;
    for (const auto& p : pa) inter += pb.count(p);
    std::size_t uni = pa.size() + pb.size() - inter;
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

BBox pixel_hull(const BBox& a, const BBox& b) {
    int top = std::min(a.top, b.top), left = std::min(a.left, b.left);
    int bottom = std::max(a.bottom(), b.bottom()), right = std::max(a.right(), b.right());
    return BBox{top, left, right - left, bottom - top};
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("bbox accessors use exclusive right/bottom") {
    BBox b = bx(2, 3, 4, 5);
    CHECK(b.right() == 7);
    CHECK(b.bottom() == 7);
    CHECK(b.area() == 20);
    CHECK(b.contains(3, 2));
    CHECK(b.contains(6, 6));
    CHECK_FALSE(b.contains(7, 2));
    CHECK_FALSE(b.contains(3, 7));
}

TEST_CASE("iou frozen fixtures") {
    CHECK(iou(bx(0, 0, 10, 10), bx(0, 0, 10, 10)) == doctest::Approx(1.0));
    CHECK(iou(bx(0, 0, 10, 10), bx(0, 20, 10, 10)) == doctest::Approx(0.0));
    // Offset by half the height: inter 20x5=100, union 300.
    CHECK(iou(bx(0, 0, 20, 10), bx(5, 0, 20, 10)) == doctest::Approx(100.0 / 300.0));
    // Containment: part 4x4 inside 10x10 -> 16/100.
    CHECK(iou(bx(0, 0, 10, 10), bx(2, 2, 4, 4)) == doctest::Approx(16.0 / 100.0));
    // Boxes merely touching edges share no pixel.
    CHECK(iou(bx(0, 0, 5, 5), bx(0, 5, 5, 5)) == doctest::Approx(0.0));
}

TEST_CASE("intersect") {
    auto i = intersect(bx(0, 0, 10, 10), bx(5, 5, 10, 10));
    REQUIRE(i.has_value());
    CHECK(*i == bx(5, 5, 5, 5));
    CHECK_FALSE(intersect(bx(0, 0, 5, 5), bx(0, 5, 5, 5)).has_value());
    CHECK_FALSE(intersect(bx(0, 0, 3, 3), bx(10, 10, 3, 3)).has_value());
}

TEST_CASE("union_bbox is the minimal box covering both pixel sets") {
    // A box spanning rows 2..6 and cols 3..6 joined with the origin pixel:
    // the hull covers rows 0..6 and cols 0..6 -> 7x7 at the origin.
    CHECK(union_bbox(bx(2, 3, 4, 5), bx(0, 0, 1, 1)) == bx(0, 0, 7, 7));
    CHECK(union_bbox(bx(0, 0, 1, 1), bx(2, 3, 4, 5)) == bx(0, 0, 7, 7));
    CHECK(union_bbox(bx(1, 1, 2, 2), bx(1, 1, 2, 2)) == bx(1, 1, 2, 2));
}

TEST_CASE("iou and union match the pixel-set oracle on random pairs") {
    Rng rng(20240901);
    for (int i = 0; i < 300; ++i) {
        BBox a = bx(rng.uniform_int(0, 40), rng.uniform_int(0, 40), rng.uniform_int(1, 20),
                    rng.uniform_int(1, 20));
        BBox b = bx(rng.uniform_int(0, 40), rng.uniform_int(0, 40), rng.uniform_int(1, 20),
                    rng.uniform_int(1, 20));
        CHECK(iou(a, b) == doctest::Approx(pixel_iou(a, b)).epsilon(1e-12));
        CHECK(union_bbox(a, b) == pixel_hull(a, b));
        CHECK(iou(a, b) == iou(b, a));
    }
}

TEST_CASE("pixel mask basics") {
    PixelMask m(4, 3);
    CHECK(m.popcount() == 0);
    m.set(0, 0, 1);
    m.set(3, 2, 1);
    CHECK(m.popcount() == 2);
    CHECK(m.at(0, 0) == 1);
    CHECK(m.at(1, 0) == 0);
    PixelMask full(2, 2, 1);
    CHECK(full.popcount() == 4);
}

TEST_CASE("rle canonical form") {
    // Rows 0110 / 0110 -> runs 1,2,2,2,1 (starts with zeros).
    PixelMask m(4, 2);
    m.set(1, 0, 1);
    m.set(2, 0, 1);
    m.set(1, 1, 1);
    m.set(2, 1, 1);
    CHECK(rle_encode(m) == std::vector<std::int64_t>{1, 2, 2, 2, 1});

    PixelMask ones(3, 2, 1);
    CHECK(rle_encode(ones) == std::vector<std::int64_t>{0, 6});
    PixelMask zeros(3, 2);
    CHECK(rle_encode(zeros) == std::vector<std::int64_t>{6});
}

TEST_CASE("rle round-trip and validation") {
    Rng rng(77);
    for (int i = 0; i < 100; ++i) {
        int w = rng.uniform_int(1, 12), h = rng.uniform_int(1, 12);
        PixelMask m(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (rng.chance(0.4)) m.set(x, y, 1);
        auto runs = rle_encode(m);
        // Canonical: later runs non-empty, counts sum to the area.
        std::int64_t sum = 0;
        for (std::size_t k = 0; k < runs.size(); ++k) {
            if (k > 0) CHECK(runs[k] > 0);
            sum += runs[k];
        }
        CHECK(sum == static_cast<std::int64_t>(w) * h);
        CHECK(rle_decode(w, h, runs) == m);
    }
    CHECK_THROWS_AS(rle_decode(2, 2, {5}), MalformedRle);          // wrong sum
    CHECK_THROWS_AS(rle_decode(2, 2, {1, 0, 3}), MalformedRle);    // empty later run
    CHECK_THROWS_AS(rle_decode(2, 2, {-1, 5}), MalformedRle);      // negative
    CHECK(rle_decode(2, 2, {0, 4}) == PixelMask(2, 2, 1));         // leading zero run ok
}

TEST_CASE("mask_iou anchors masks at their boxes") {
    PixelMask a(4, 2, 1), b(4, 2, 1);
    // Boxes overlap in a 2x2 region; both masks full there: inter 4, union 12.
    CHECK(mask_iou(bx(0, 0, 4, 2), a, bx(0, 2, 4, 2), b) == doctest::Approx(4.0 / 12.0));
    // Identical placement -> 1.
    CHECK(mask_iou(bx(3, 5, 4, 2), a, bx(3, 5, 4, 2), b) == doctest::Approx(1.0));
    // Disjoint boxes -> 0.
    CHECK(mask_iou(bx(0, 0, 4, 2), a, bx(10, 10, 4, 2), b) == doctest::Approx(0.0));
    // Same boxes, disjoint ink -> 0.
    PixelMask left_half(4, 2), right_half(4, 2);
    for (int y = 0; y < 2; ++y) {
        left_half.set(0, y, 1);
        left_half.set(1, y, 1);
        right_half.set(2, y, 1);
        right_half.set(3, y, 1);
    }
    CHECK(mask_iou(bx(0, 0, 4, 2), left_half, bx(0, 0, 4, 2), right_half) ==
          doctest::Approx(0.0));
}

TEST_CASE("edt_squared exact distances") {
    PixelMask seeds(5, 5);
    seeds.set(2, 2, 1);
    auto d = edt_squared(seeds);
    CHECK(d[2 * 5 + 2] == doctest::Approx(0.0));
    CHECK(d[2 * 5 + 0] == doctest::Approx(4.0));   // (0,2): dx 2
    CHECK(d[0 * 5 + 0] == doctest::Approx(8.0));   // (0,0): 2^2+2^2
    CHECK(d[1 * 5 + 1] == doctest::Approx(2.0));   // (1,1)
    PixelMask empty(3, 3);
    auto de = edt_squared(empty);
    for (double v : de) CHECK(v > 9.0);  // sentinel beyond any on-grid distance
}

TEST_CASE("disc morphology") {
    PixelMask m(7, 7);
    m.set(3, 3, 1);
    PixelMask d1 = dilate_mask(m, 1.0);
    CHECK(d1.popcount() == 5);  // center + 4-neighborhood (euclidean r=1)
    PixelMask d15 = dilate_mask(m, 1.5);
    CHECK(d15.popcount() == 9);  // diagonals at sqrt(2) join
    CHECK(erode_mask(d1, 1.0).popcount() == 1);
    CHECK(erode_mask(d1, 1.0).at(3, 3) == 1);
    // Radius 0 is the identity both ways.
    CHECK(erode_mask(d1, 0.0) == d1);
    CHECK(dilate_mask(d1, 0.0) == d1);
}

TEST_CASE("crop_tight") {
    PixelMask m(6, 5);
    m.set(2, 1, 1);
    m.set(4, 3, 1);
    int ox = -1, oy = -1;
    PixelMask c = crop_tight(m, &ox, &oy);
    CHECK(ox == 2);
    CHECK(oy == 1);
    CHECK(c.width == 3);
    CHECK(c.height == 3);
    CHECK(c.at(0, 0) == 1);
    CHECK(c.at(2, 2) == 1);
    CHECK(c.popcount() == 2);
    PixelMask empty(3, 3);
    CHECK_THROWS_AS(crop_tight(empty, &ox, &oy), DegenerateInput);
}

}  // TEST_SUITE
