#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace timelinekit {

using Rgb = std::array<std::uint8_t, 3>;

// Dense 8-bit RGB image, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // 3 * width * height

    Image() = default;
    Image(int w, int h, Rgb fill = {255, 255, 255});

    std::uint8_t* px(int x, int y) { return rgb.data() + 3 * (static_cast<size_t>(y) * width + x); }
    const std::uint8_t* px(int x, int y) const {
        return rgb.data() + 3 * (static_cast<size_t>(y) * width + x);
    }
    Rgb get(int x, int y) const {
        const std::uint8_t* p = px(x, y);
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, Rgb c) {
        std::uint8_t* p = px(x, y);
        p[0] = c[0];
        p[1] = c[1];
        p[2] = c[2];
    }
    bool operator==(const Image&) const = default;
};

// RGBA variant used for template patches (alpha = element mask).
struct ImageRgba {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgba;  // 4 * width * height

    ImageRgba() = default;
    ImageRgba(int w, int h) : width(w), height(h), rgba(static_cast<size_t>(w) * h * 4, 0) {}

    std::uint8_t* px(int x, int y) { return rgba.data() + 4 * (static_cast<size_t>(y) * width + x); }
    const std::uint8_t* px(int x, int y) const {
        return rgba.data() + 4 * (static_cast<size_t>(y) * width + x);
    }
    bool operator==(const ImageRgba&) const = default;
};

// PNG IO via libpng with fixed settings so identical pixels produce identical
// bytes. Throws IoError on anything unreadable/unwritable.
void save_png(const Image& img, const std::string& path);
Image load_png(const std::string& path);

std::vector<std::uint8_t> encode_png(const ImageRgba& img);
ImageRgba decode_png(const std::vector<std::uint8_t>& bytes);

// Peek at a PNG header for dimensions without decoding the pixel data.
bool png_dimensions(const std::string& path, int* width, int* height);

}  // namespace timelinekit
