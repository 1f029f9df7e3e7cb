#include "timelinekit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "timelinekit/errors.hpp"

namespace timelinekit {

std::optional<BBox> intersect(const BBox& a, const BBox& b) {
    int top = std::max(a.top, b.top);
    int left = std::max(a.left, b.left);
    int bottom = std::min(a.bottom(), b.bottom());
    int right = std::min(a.right(), b.right());
    if (right <= left || bottom <= top) return std::nullopt;
    return BBox{top, left, right - left, bottom - top};
}

double iou(const BBox& a, const BBox& b) {
    auto inter = intersect(a, b);
    if (!inter) return 0.0;
    long long ia = inter->area();
    long long uni = a.area() + b.area() - ia;
    return static_cast<double>(ia) / static_cast<double>(uni);
}

BBox union_bbox(const BBox& a, const BBox& b) {
    int top = std::min(a.top, b.top);
    int left = std::min(a.left, b.left);
    int bottom = std::max(a.bottom(), b.bottom());
    int right = std::max(a.right(), b.right());
    return BBox{top, left, right - left, bottom - top};
}

long long PixelMask::popcount() const {
    long long n = 0;
    for (std::uint8_t b : bits) n += (b != 0);
    return n;
}

std::vector<std::int64_t> rle_encode(const PixelMask& mask) {
    std::vector<std::int64_t> runs;
    std::uint8_t current = 0;  // encoding starts in the 0 state
    std::int64_t count = 0;
    for (std::uint8_t raw : mask.bits) {
        std::uint8_t b = raw ? 1 : 0;
        if (b == current) {
            ++count;
        } else {
            runs.push_back(count);
            current = b;
            count = 1;
        }
    }
    runs.push_back(count);
    // A mask with zero pixels encodes as the single run [0].
    return runs;
}

PixelMask rle_decode(int width, int height, const std::vector<std::int64_t>& runs) {
    if (width < 0 || height < 0) throw MalformedRle("negative mask dimensions");
    const std::int64_t total = static_cast<std::int64_t>(width) * height;
    PixelMask mask(width, height);
    std::int64_t pos = 0;
    std::uint8_t value = 0;
    for (size_t i = 0; i < runs.size(); ++i) {
        std::int64_t n = runs[i];
        if (n < 0) throw MalformedRle("negative run length");
        if (n == 0 && i != 0) throw MalformedRle("zero-length run past the first");
        if (pos + n > total) throw MalformedRle("run counts exceed mask size");
        if (value) std::fill(mask.bits.begin() + pos, mask.bits.begin() + pos + n, std::uint8_t{1});
        pos += n;
        value ^= 1;
    }
    if (pos != total) throw MalformedRle("run counts do not cover the mask");
    return mask;
}

double mask_iou(const BBox& box_a, const PixelMask& a, const BBox& box_b, const PixelMask& b) {
    if (a.width != box_a.width || a.height != box_a.height || b.width != box_b.width ||
        b.height != box_b.height)
        throw MalformedRle("mask dims do not match bbox dims");
    long long pa = a.popcount();
    long long pb = b.popcount();
    if (pa == 0 && pb == 0) return 0.0;
    long long inter = 0;
    if (auto ib = intersect(box_a, box_b)) {
        for (int y = ib->top; y < ib->bottom(); ++y) {
            for (int x = ib->left; x < ib->right(); ++x) {
                if (a.at(x - box_a.left, y - box_a.top) && b.at(x - box_b.left, y - box_b.top))
                    ++inter;
            }
        }
    }
    long long uni = pa + pb - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

constexpr double kFar = 1e18;

// Felzenszwalb & Huttenlocher 1-D squared distance transform.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = 0;
    v[0] = 0;
    z[0] = -kFar;
    z[1] = kFar;
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            int p = v[k];
            s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
                (2.0 * (q - p));
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kFar;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace

std::vector<double> edt_squared(const PixelMask& seeds) {
    const int w = seeds.width, h = seeds.height;
    std::vector<double> dist(static_cast<size_t>(w) * h, kFar);
    if (w == 0 || h == 0) return dist;
    for (size_t i = 0; i < dist.size(); ++i)
        if (seeds.bits[i]) dist[i] = 0.0;

    // columns
    {
        std::vector<double> f(h), d(h), z(h + 1);
        std::vector<int> v(h);
        for (int x = 0; x < w; ++x) {
            for (int y = 0; y < h; ++y) f[y] = dist[static_cast<size_t>(y) * w + x];
            edt_1d(f, d, v, z);
            for (int y = 0; y < h; ++y) dist[static_cast<size_t>(y) * w + x] = d[y];
        }
    }
    // rows
    {
        std::vector<double> f(w), d(w), z(w + 1);
        std::vector<int> v(w);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) f[x] = dist[static_cast<size_t>(y) * w + x];
            edt_1d(f, d, v, z);
            for (int x = 0; x < w; ++x) dist[static_cast<size_t>(y) * w + x] = d[x];
        }
    }
    return dist;
}

PixelMask erode_mask(const PixelMask& mask, double radius) {
    if (radius <= 0.0) return mask;
    PixelMask inv(mask.width, mask.height);
    for (size_t i = 0; i < mask.bits.size(); ++i) inv.bits[i] = mask.bits[i] ? 0 : 1;
    std::vector<double> d = edt_squared(inv);
    PixelMask out(mask.width, mask.height);
    const double r2 = radius * radius;
    for (size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = (mask.bits[i] && d[i] > r2) ? 1 : 0;
    return out;
}

PixelMask dilate_mask(const PixelMask& mask, double radius) {
    if (radius <= 0.0) return mask;
    std::vector<double> d = edt_squared(mask);
    PixelMask out(mask.width, mask.height);
    const double r2 = radius * radius;
    for (size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = d[i] <= r2 ? 1 : 0;
    return out;
}

PixelMask crop_tight(const PixelMask& m, int* offx, int* offy) {
    int x0 = m.width, y0 = m.height, x1 = -1, y1 = -1;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) throw DegenerateInput("empty raster");
    PixelMask out(x1 - x0 + 1, y1 - y0 + 1);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) out.set(x - x0, y - y0, m.at(x, y));
    *offx = x0;
    *offy = y0;
    return out;
}

}  // namespace timelinekit
