#include "timelinekit/image.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>

#include "timelinekit/errors.hpp"

namespace timelinekit {

Image::Image(int w, int h, Rgb fill) : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3) {
    for (size_t i = 0; i < rgb.size(); i += 3) {
        rgb[i] = fill[0];
        rgb[i + 1] = fill[1];
        rgb[i + 2] = fill[2];
    }
}

namespace {

struct PngWriteBuf {
    std::vector<std::uint8_t>* out;
};

void write_to_vec(png_structp png, png_bytep data, png_size_t len) {
    auto* buf = static_cast<PngWriteBuf*>(png_get_io_ptr(png));
    buf->out->insert(buf->out->end(), data, data + len);
}

void flush_noop(png_structp) {}

struct PngReadBuf {
    const std::uint8_t* data;
    size_t size;
    size_t pos;
};

void read_from_vec(png_structp png, png_bytep out, png_size_t len) {
    auto* buf = static_cast<PngReadBuf*>(png_get_io_ptr(png));
    if (buf->pos + len > buf->size) png_error(png, "read past end of buffer");
    std::memcpy(out, buf->data + buf->pos, len);
    buf->pos += len;
}

// Writes rows of `channels` bytes/px with deterministic settings.
void write_png_impl(const std::uint8_t* pixels, int width, int height, int channels,
                    std::vector<std::uint8_t>* mem_out, FILE* file_out) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    std::vector<png_bytep> rows(static_cast<size_t>(height));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png write failed");
    }
    PngWriteBuf buf{mem_out};
    if (mem_out)
        png_set_write_fn(png, &buf, write_to_vec, flush_noop);
    else
        png_init_io(png, file_out);
    // Pin everything that could vary so equal pixels give equal bytes.
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_NONE);
    png_set_IHDR(png, info, width, height, 8,
                 channels == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const size_t stride = static_cast<size_t>(width) * channels;
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(pixels + static_cast<size_t>(y) * stride);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Reads any 8-bit-convertible PNG into `channels` (3 or 4) bytes/px.
void read_png_impl(png_structp png, png_infop info, int channels, int* width, int* height,
                   std::vector<std::uint8_t>* pixels) {
    png_read_info(png, info);
    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (channels == 4)
        png_set_add_alpha(png, 0xFF, PNG_FILLER_AFTER);
    else
        png_set_strip_alpha(png);
    png_read_update_info(png, info);

    *width = static_cast<int>(w);
    *height = static_cast<int>(h);
    pixels->resize(static_cast<size_t>(w) * h * channels);
    std::vector<png_bytep> rows(h);
    const size_t stride = static_cast<size_t>(w) * channels;
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels->data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
}

}  // namespace

void save_png(const Image& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0) throw IoError("cannot save empty image: " + path);
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open for write: " + path);
    try {
        write_png_impl(img.rgb.data(), img.width, img.height, 3, nullptr, f);
    } catch (...) {
        std::fclose(f);
        throw;
    }
    std::fclose(f);
}

Image load_png(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open for read: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(f);
        throw IoError("libpng init failed");
    }
    Image img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(f);
        throw IoError("png read failed: " + path);
    }
    png_init_io(png, f);
    read_png_impl(png, info, 3, &img.width, &img.height, &img.rgb);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(f);
    return img;
}

std::vector<std::uint8_t> encode_png(const ImageRgba& img) {
    if (img.width <= 0 || img.height <= 0) throw IoError("cannot encode empty patch");
    std::vector<std::uint8_t> out;
    write_png_impl(img.rgba.data(), img.width, img.height, 4, &out, nullptr);
    return out;
}

ImageRgba decode_png(const std::vector<std::uint8_t>& bytes) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    ImageRgba img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png decode failed");
    }
    PngReadBuf buf{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &buf, read_from_vec);
    read_png_impl(png, info, 4, &img.width, &img.height, &img.rgba);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

bool png_dimensions(const std::string& path, int* width, int* height) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    std::uint8_t hdr[24];
    if (!f.read(reinterpret_cast<char*>(hdr), 24)) return false;
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (std::memcmp(hdr, sig, 8) != 0) return false;
    if (std::memcmp(hdr + 12, "IHDR", 4) != 0) return false;
    auto be32 = [&](int off) {
        return (hdr[off] << 24) | (hdr[off + 1] << 16) | (hdr[off + 2] << 8) | hdr[off + 3];
    };
    *width = be32(16);
    *height = be32(20);
    return true;
}

}  // namespace timelinekit
