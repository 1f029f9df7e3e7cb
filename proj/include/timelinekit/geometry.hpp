#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "timelinekit/errors.hpp"

namespace timelinekit {

// Axis-aligned pixel box. (top,left) is the first pixel inside the box;
// right()/bottom() are exclusive. A valid box has width >= 1 and height >= 1;
// top/left may be negative (content poking off-canvas is representable).
struct BBox {
    int top = 0;
    int left = 0;
    int width = 1;
    int height = 1;

    int right() const { return left + width; }
    int bottom() const { return top + height; }
    long long area() const { return static_cast<long long>(width) * height; }
    bool contains(int x, int y) const {
        return x >= left && x < right() && y >= top && y < bottom();
    }
    bool operator==(const BBox&) const = default;
};

// Intersection box, or nullopt when the boxes share no pixel.
std::optional<BBox> intersect(const BBox& a, const BBox& b);

// Pixel-discrete IoU: |A∩B| / |A∪B| over integer pixel sets.
double iou(const BBox& a, const BBox& b);

// Smallest box containing both inputs.
BBox union_bbox(const BBox& a, const BBox& b);

// Dense binary mask, row-major, one byte per pixel (0 or 1).
struct PixelMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // size width*height

    PixelMask() = default;
    PixelMask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), bits(static_cast<size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { bits[static_cast<size_t>(y) * width + x] = v; }
    long long popcount() const;
    bool operator==(const PixelMask&) const = default;
};

// Run-length encoding: alternating run counts of 0s and 1s in row-major order,
// always starting with a (possibly zero-length) run of 0s. Every later run is
// non-empty and counts sum to width*height. Canonical, so encode/decode is a
// bijection and encoded masks diff cleanly.
std::vector<std::int64_t> rle_encode(const PixelMask& mask);

// Throws MalformedRle on negative counts, zero-length runs past the first, or
// a count sum that does not equal width*height.
PixelMask rle_decode(int width, int height, const std::vector<std::int64_t>& runs);

// IoU of two masks anchored at bbox top-left corners, measured in absolute
// image coordinates. Mask dims must match their bbox dims.
double mask_iou(const BBox& box_a, const PixelMask& a, const BBox& box_b, const PixelMask& b);

// Squared Euclidean distance transform (two-pass, exact): for every pixel the
// squared distance to the nearest nonzero pixel of `seeds`. Pixels of an
// empty seed mask get a huge sentinel (> any on-grid distance).
std::vector<double> edt_squared(const PixelMask& seeds);

// Binary morphology with a Euclidean disc of radius r (r >= 0; r == 0 is the
// identity). Built on the exact distance transform.
PixelMask erode_mask(const PixelMask& mask, double radius);
PixelMask dilate_mask(const PixelMask& mask, double radius);

// Crop a mask to its tight ink bounds; *offx/*offy receive the crop origin.
// Throws DegenerateInput on an empty mask.
PixelMask crop_tight(const PixelMask& m, int* offx, int* offy);

}  // namespace timelinekit
