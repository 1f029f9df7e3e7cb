#include "timelinekit/detsim.hpp"

#include <algorithm>
#include <cmath>

#include "timelinekit/errors.hpp"
#include "timelinekit/rng.hpp"

namespace timelinekit {
namespace detsim {

namespace {

// Re-anchor a bbox-local mask onto a moved/resized bbox; pixels that fall
// outside the old mask read as 0. Guarantees at least one set pixel.
PixelMask reanchor_mask(const PixelMask& mask, const BBox& old_box, const BBox& new_box) {
    PixelMask out(new_box.width, new_box.height);
    for (int y = 0; y < out.height; ++y) {
        int oy = new_box.top + y - old_box.top;
        if (oy < 0 || oy >= old_box.height) continue;
        for (int x = 0; x < out.width; ++x) {
            int ox = new_box.left + x - old_box.left;
            if (ox < 0 || ox >= old_box.width) continue;
            out.set(x, y, mask.at(ox, oy));
        }
    }
    if (out.popcount() == 0) out.set(out.width / 2, out.height / 2, 1);
    return out;
}

BBox jitter_box(Rng& rng, const BBox& box, double sigma, int img_w, int img_h) {
    if (sigma <= 0.0) return box;
    int dt = static_cast<int>(std::llround(rng.normal(0.0, sigma)));
    int dl = static_cast<int>(std::llround(rng.normal(0.0, sigma)));
    int db = static_cast<int>(std::llround(rng.normal(0.0, sigma)));
    int dr = static_cast<int>(std::llround(rng.normal(0.0, sigma)));
    int top = box.top + dt, left = box.left + dl;
    int bottom = box.bottom() + db, right = box.right() + dr;
    if (right <= left) right = left + 1;
    if (bottom <= top) bottom = top + 1;
    // keep at least a sliver on-canvas
    left = std::clamp(left, -box.width + 1, img_w - 1);
    top = std::clamp(top, -box.height + 1, img_h - 1);
    if (right <= left) right = left + 1;
    if (bottom <= top) bottom = top + 1;
    return BBox{top, left, right - left, bottom - top};
}

double tp_score(Rng& rng, const ScoreModel& m) {
    return rng.truncated_normal(m.mu_tp, m.sigma_tp, 0.0, 1.0);
}
double fp_score(Rng& rng, const ScoreModel& m) {
    return rng.truncated_normal(m.mu_fp, m.sigma_fp, 0.0, 1.0);
}

ElementCategory random_other_category(Rng& rng, ElementCategory cur) {
    std::vector<ElementCategory> cats;
    for (ElementCategory c : all_categories())
        if (c != cur) cats.push_back(c);
    return rng.pick(cats);
}

}  // namespace

std::vector<Detection> perturb(const AnnotatedTimeline& gt, const NoiseProfile& noise,
                               std::uint64_t seed) {
    if (noise.drop_rate < 0 || noise.drop_rate > 1 || noise.duplicate_rate < 0 ||
        noise.misclassify_rate < 0 || noise.jitter_px < 0)
        throw DegenerateInput("invalid noise profile");
    Rng rng(derive_seed(seed, 0xde75));
    const int W = gt.image.width, H = gt.image.height;
    std::vector<Detection> out;
    out.reserve(gt.elements.size());

    for (const Element& el : gt.elements) {
        if (rng.chance(noise.drop_rate)) continue;

        Detection det;
        det.category = el.category;
        det.bbox = jitter_box(rng, el.bbox, noise.jitter_px, W, H);
        if (det.bbox == el.bbox) {
            det.mask = el.mask;
        } else {
            det.mask = reanchor_mask(el.mask, el.bbox, det.bbox);
        }
        if (noise.mask_coarsen_px > 0.0 && det.mask) {
            bool grow = rng.chance(0.5);
            PixelMask m = grow ? dilate_mask(*det.mask, noise.mask_coarsen_px)
                               : erode_mask(*det.mask, noise.mask_coarsen_px);
            if (m.popcount() > 0) det.mask = std::move(m);
        }
        if (rng.chance(noise.misclassify_rate))
            det.category = random_other_category(rng, det.category);
        det.score = tp_score(rng, noise.score);
        out.push_back(det);

        if (rng.chance(noise.duplicate_rate)) {
            Detection dup = out.back();
            double sigma = std::max(noise.jitter_px, 2.0);
            for (int attempt = 0; attempt < 20; ++attempt) {
                BBox cand = jitter_box(rng, det.bbox, sigma, W, H);
                if (iou(cand, det.bbox) >= 0.3) {
                    dup.bbox = cand;
                    break;
                }
                dup.bbox = det.bbox;  // fall back to an exact copy
            }
            if (det.mask) dup.mask = reanchor_mask(*det.mask, det.bbox, dup.bbox);
            dup.score = fp_score(rng, noise.score);
            out.push_back(std::move(dup));
        }
    }

    if (noise.hallucination_rate > 0.0) {
        for (size_t i = 0; i < gt.elements.size(); ++i) {
            if (!rng.chance(noise.hallucination_rate)) continue;
            Detection fake;
            int w = static_cast<int>(rng.uniform_int(6, std::max(7, W / 6)));
            int h = static_cast<int>(rng.uniform_int(6, std::max(7, H / 6)));
            fake.bbox = BBox{static_cast<int>(rng.uniform_int(0, std::max(0, H - h - 1))),
                             static_cast<int>(rng.uniform_int(0, std::max(0, W - w - 1))), w, h};
            std::vector<ElementCategory> cats = all_categories();
            fake.category = rng.pick(cats);
            fake.score = fp_score(rng, noise.score);
            out.push_back(std::move(fake));
        }
    }
    return out;
}

}  // namespace detsim
}  // namespace timelinekit
