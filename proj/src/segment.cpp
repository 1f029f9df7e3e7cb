#include "timelinekit/segment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "timelinekit/errors.hpp"
#include "timelinekit/maxflow.hpp"

namespace timelinekit {
namespace segment {

namespace {

constexpr double kHardLink = 1e9;  // t-link weight enforcing definite labels

BBox clip_to_image(const BBox& b, const Image& img) {
    int top = std::clamp(b.top, 0, img.height - 1);
    int left = std::clamp(b.left, 0, img.width - 1);
    int bottom = std::clamp(b.bottom(), top + 1, img.height);
    int right = std::clamp(b.right(), left + 1, img.width);
    return BBox{top, left, right - left, bottom - top};
}

std::array<double, 3> pixel_color(const Image& img, int x, int y) {
    const std::uint8_t* p = img.px(x, y);
    return {static_cast<double>(p[0]), static_cast<double>(p[1]), static_cast<double>(p[2])};
}

}  // namespace

Trimap init_trimap(const Image& img, const BBox& bbox_in, const PixelMask* mask, int margin,
                   double erode_px, double context_px) {
    if (img.width <= 0 || img.height <= 0) throw DegenerateInput("empty image");
    BBox bbox = clip_to_image(bbox_in, img);
    BBox roi = clip_to_image(
        BBox{bbox.top - margin, bbox.left - margin, bbox.width + 2 * margin,
             bbox.height + 2 * margin},
        img);

    Trimap tri;
    tri.roi = roi;
    tri.labels.assign(static_cast<size_t>(roi.width) * roi.height, TrimapLabel::DefiniteBg);
    for (int y = 0; y < roi.height; ++y)
        for (int x = 0; x < roi.width; ++x)
            if (bbox.contains(roi.left + x, roi.top + y)) tri.set(x, y, TrimapLabel::ProbableFg);

    bool use_mask = false;
    PixelMask eroded, near;
    if (mask) {
        if (mask->width != bbox_in.width || mask->height != bbox_in.height)
            throw DegenerateInput("mask dims do not match bbox dims");
        // Work in ROI coordinates so the distance field sees the ROI context.
        PixelMask roi_mask(roi.width, roi.height);
        for (int y = 0; y < mask->height; ++y) {
            for (int x = 0; x < mask->width; ++x) {
                if (!mask->at(x, y)) continue;
                int ix = bbox_in.left + x, iy = bbox_in.top + y;
                if (ix >= roi.left && ix < roi.right() && iy >= roi.top && iy < roi.bottom())
                    roi_mask.set(ix - roi.left, iy - roi.top, 1);
            }
        }
        eroded = erode_mask(roi_mask, erode_px);
        if (eroded.popcount() > 0) {
            use_mask = true;
            std::vector<double> dist = edt_squared(roi_mask);
            const double far2 = context_px * context_px;
            // Seed the foreground with the mask alone; the soft ring around it
            // is where the cut may grow (detector boxes routinely clip the
            // artwork by a few pixels), and everything farther stays clamped.
            for (int y = 0; y < roi.height; ++y) {
                for (int x = 0; x < roi.width; ++x) {
                    size_t i = static_cast<size_t>(y) * roi.width + x;
                    if (eroded.bits[i])
                        tri.set(x, y, TrimapLabel::DefiniteFg);
                    else if (roi_mask.bits[i])
                        tri.set(x, y, TrimapLabel::ProbableFg);
                    else if (dist[i] <= far2)
                        tri.set(x, y, TrimapLabel::ProbableBg);
                    else
                        tri.set(x, y, TrimapLabel::DefiniteBg);
                }
            }
        }
        // An erosion that wipes the mask means it is too thin to trust; keep
        // the bbox-only trimap already in place.
        (void)use_mask;
    }

    // If the bbox covers the whole ROI there is no background ring; force the
    // outermost ROI pixels to ProbableBg so a background model can exist.
    bool has_bg = false;
    for (TrimapLabel l : tri.labels)
        if (l == TrimapLabel::DefiniteBg || l == TrimapLabel::ProbableBg) {
            has_bg = true;
            break;
        }
    if (!has_bg) {
        for (int y = 0; y < roi.height; ++y)
            for (int x = 0; x < roi.width; ++x)
                if ((y == 0 || y == roi.height - 1 || x == 0 || x == roi.width - 1) &&
                    tri.at(x, y) != TrimapLabel::DefiniteFg)
                    tri.set(x, y, TrimapLabel::ProbableBg);
    }
    return tri;
}

// ---- GMM -------------------------------------------------------------------

namespace {

double sq_dist3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

// 3x3 inverse + determinant via adjugate; det > 0 kept by regularization.
void invert3(const std::array<double, 9>& m, std::array<double, 9>* inv, double* det) {
    double a = m[0], b = m[1], c = m[2];
    double d = m[3], e = m[4], f = m[5];
    double g = m[6], h = m[7], i = m[8];
    double A = e * i - f * h, B = -(d * i - f * g), C = d * h - e * g;
    double D = -(b * i - c * h), E = a * i - c * g, F = -(a * h - b * g);
    double G = b * f - c * e, H = -(a * f - c * d), I = a * e - b * d;
    *det = a * A + b * B + c * C;
    double inv_det = 1.0 / *det;
    *inv = {A * inv_det, D * inv_det, G * inv_det, B * inv_det, E * inv_det,
            H * inv_det, C * inv_det, F * inv_det, I * inv_det};
}

double mahalanobis_sq(const GmmComponent& comp, const std::array<double, 3>& x) {
    double d0 = x[0] - comp.mean[0], d1 = x[1] - comp.mean[1], d2 = x[2] - comp.mean[2];
    const auto& v = comp.inv_cov;
    double m0 = v[0] * d0 + v[1] * d1 + v[2] * d2;
    double m1 = v[3] * d0 + v[4] * d1 + v[5] * d2;
    double m2 = v[6] * d0 + v[7] * d1 + v[8] * d2;
    return d0 * m0 + d1 * m1 + d2 * m2;
}

}  // namespace

double Gmm::neg_log_likelihood(const std::array<double, 3>& x) const {
    // log-sum-exp over component log densities (weights folded into log_norm)
    double best = -std::numeric_limits<double>::infinity();
    double terms[16];
    size_t n = comps.size();
    for (size_t k = 0; k < n; ++k) {
        terms[k] = comps[k].log_norm - 0.5 * mahalanobis_sq(comps[k], x);
        best = std::max(best, terms[k]);
    }
    double sum = 0.0;
    for (size_t k = 0; k < n; ++k) sum += std::exp(terms[k] - best);
    return -(best + std::log(sum));
}

int Gmm::most_likely_component(const std::array<double, 3>& x) const {
    int arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < comps.size(); ++k) {
        double t = comps[k].log_norm - 0.5 * mahalanobis_sq(comps[k], x);
        if (t > best) {
            best = t;
            arg = static_cast<int>(k);
        }
    }
    return arg;
}

Gmm fit_gmm(const std::vector<std::array<double, 3>>& pixels, int k) {
    if (pixels.empty()) throw DegenerateInput("cannot fit a mixture to zero samples");
    const size_t n = pixels.size();
    // 16 is the fixed scratch size in neg_log_likelihood.
    const int K = std::clamp<int>(std::min<int>(k, static_cast<int>(n)), 1, 16);

    // Deterministic farthest-point seeding: start at the sample nearest the
    // mean, then repeatedly take the point farthest from all chosen centers.
    std::array<double, 3> mean{};
    for (const auto& p : pixels)
        for (int c = 0; c < 3; ++c) mean[c] += p[c];
    for (int c = 0; c < 3; ++c) mean[c] /= static_cast<double>(n);

    std::vector<std::array<double, 3>> centers;
    {
        size_t arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < n; ++i) {
            double d = sq_dist3(pixels[i], mean);
            if (d < best) {
                best = d;
                arg = i;
            }
        }
        centers.push_back(pixels[arg]);
    }
    std::vector<double> min_dist(n);
    while (static_cast<int>(centers.size()) < K) {
        size_t arg = 0;
        double best = -1.0;
        for (size_t i = 0; i < n; ++i) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) d = std::min(d, sq_dist3(pixels[i], c));
            min_dist[i] = d;
            if (d > best) {
                best = d;
                arg = i;
            }
        }
        centers.push_back(pixels[arg]);
    }

    std::vector<int> assign(n, 0);
    auto reassign = [&]() {
        bool changed = false;
        for (size_t i = 0; i < n; ++i) {
            int arg = 0;
            double best = std::numeric_limits<double>::infinity();
            for (size_t c = 0; c < centers.size(); ++c) {
                double d = sq_dist3(pixels[i], centers[c]);
                if (d < best) {
                    best = d;
                    arg = static_cast<int>(c);
                }
            }
            if (assign[i] != arg) {
                assign[i] = arg;
                changed = true;
            }
        }
        return changed;
    };
    reassign();
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<std::array<double, 3>> sums(centers.size(), {0, 0, 0});
        std::vector<size_t> counts(centers.size(), 0);
        for (size_t i = 0; i < n; ++i) {
            for (int c = 0; c < 3; ++c) sums[static_cast<size_t>(assign[i])][c] += pixels[i][c];
            ++counts[static_cast<size_t>(assign[i])];
        }
        for (size_t c = 0; c < centers.size(); ++c)
            if (counts[c])
                for (int d = 0; d < 3; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        if (!reassign()) break;
    }

    Gmm gmm;
    for (size_t c = 0; c < centers.size(); ++c) {
        size_t count = 0;
        std::array<double, 3> mu{};
        for (size_t i = 0; i < n; ++i) {
            if (static_cast<size_t>(assign[i]) != c) continue;
            ++count;
            for (int d = 0; d < 3; ++d) mu[d] += pixels[i][d];
        }
        if (count == 0) continue;  // collapsed cluster: drop it
        for (int d = 0; d < 3; ++d) mu[d] /= static_cast<double>(count);
        std::array<double, 9> cov{};
        for (size_t i = 0; i < n; ++i) {
            if (static_cast<size_t>(assign[i]) != c) continue;
            double dx[3] = {pixels[i][0] - mu[0], pixels[i][1] - mu[1], pixels[i][2] - mu[2]};
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) cov[static_cast<size_t>(r) * 3 + s] += dx[r] * dx[s];
        }
        for (int d = 0; d < 9; ++d) cov[static_cast<size_t>(d)] /= static_cast<double>(count);
        for (int d = 0; d < 3; ++d) cov[static_cast<size_t>(d) * 3 + d] += 1e-3;

        GmmComponent comp;
        comp.weight = static_cast<double>(count) / static_cast<double>(n);
        comp.mean = mu;
        comp.cov = cov;
        double det = 0.0;
        invert3(cov, &comp.inv_cov, &det);
        comp.log_norm = std::log(comp.weight) -
                        0.5 * (3.0 * std::log(2.0 * std::numbers::pi) + std::log(det));
        gmm.comps.push_back(comp);
    }
    return gmm;
}

// ---- GrabCut ---------------------------------------------------------------

PixelMask grabcut(const Image& img, const Trimap& trimap, const GrabCutParams& params,
                  GrabCutStats* stats) {
    const BBox roi = trimap.roi;
    const int w = roi.width, h = roi.height;
    const size_t npx = static_cast<size_t>(w) * h;
    if (npx == 0 || trimap.labels.size() != npx) throw DegenerateInput("bad trimap");
    if (stats) {
        stats->energies.clear();
        stats->iterations = 0;
    }

    // alpha: 1 = foreground. Definite labels are immutable.
    std::vector<std::uint8_t> alpha(npx), definite(npx);
    bool any_unknown = false;
    for (size_t i = 0; i < npx; ++i) {
        TrimapLabel l = trimap.labels[i];
        alpha[i] = (l == TrimapLabel::DefiniteFg || l == TrimapLabel::ProbableFg) ? 1 : 0;
        definite[i] = (l == TrimapLabel::DefiniteFg || l == TrimapLabel::DefiniteBg) ? 1 : 0;
        if (!definite[i]) any_unknown = true;
    }
    auto to_mask = [&](const std::vector<std::uint8_t>& a) {
        PixelMask m(w, h);
        m.bits.assign(a.begin(), a.end());
        return m;
    };
    if (!any_unknown) return to_mask(alpha);

    std::vector<std::array<double, 3>> colors(npx);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            colors[static_cast<size_t>(y) * w + x] = pixel_color(img, roi.left + x, roi.top + y);

    // beta = 1 / (2 * <||z_m - z_n||^2>) over all 8-neighbor pairs.
    const int off_dx[4] = {1, 0, 1, 1};
    const int off_dy[4] = {0, 1, 1, -1};
    double sum_diff = 0.0;
    size_t n_pairs = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int d = 0; d < 4; ++d) {
                int nx = x + off_dx[d], ny = y + off_dy[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                sum_diff += sq_dist3(colors[static_cast<size_t>(y) * w + x],
                                     colors[static_cast<size_t>(ny) * w + nx]);
                ++n_pairs;
            }
        }
    }
    double beta = 0.0;
    if (n_pairs > 0 && sum_diff > 0.0) beta = 1.0 / (2.0 * sum_diff / static_cast<double>(n_pairs));

    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    double prev_energy = std::numeric_limits<double>::infinity();
    std::vector<std::uint8_t> prev_alpha = alpha;

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        std::vector<std::array<double, 3>> fg_px, bg_px;
        fg_px.reserve(npx);
        bg_px.reserve(npx);
        for (size_t i = 0; i < npx; ++i) (alpha[i] ? fg_px : bg_px).push_back(colors[i]);
        if (fg_px.empty() || bg_px.empty()) break;  // nothing left to model
        Gmm fg = fit_gmm(fg_px, params.gmm_components);
        Gmm bg = fit_gmm(bg_px, params.gmm_components);

        FlowNetwork net;
        net.reserve(static_cast<int>(npx), static_cast<int>(npx) * 6);
        int first = net.add_nodes(static_cast<int>(npx));
        for (size_t i = 0; i < npx; ++i) {
            TrimapLabel l = trimap.labels[i];
            if (l == TrimapLabel::DefiniteFg)
                net.add_terminal(first + static_cast<int>(i), kHardLink, 0.0);
            else if (l == TrimapLabel::DefiniteBg)
                net.add_terminal(first + static_cast<int>(i), 0.0, kHardLink);
            else
                // Cutting s->p labels p background and pays the background
                // data term, so s->p carries -log P_bg and p->t -log P_fg.
                net.add_terminal(first + static_cast<int>(i), bg.neg_log_likelihood(colors[i]),
                                 fg.neg_log_likelihood(colors[i]));
        }
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                size_t i = static_cast<size_t>(y) * w + x;
                for (int d = 0; d < 4; ++d) {
                    int nx = x + off_dx[d], ny = y + off_dy[d];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    size_t j = static_cast<size_t>(ny) * w + nx;
                    double wgt = params.gamma * std::exp(-beta * sq_dist3(colors[i], colors[j]));
                    if (d >= 2) wgt *= inv_sqrt2;  // diagonal neighbors are farther
                    net.add_edge(first + static_cast<int>(i), first + static_cast<int>(j), wgt, wgt);
                }
            }
        }
        double energy = net.solve();

        std::vector<std::uint8_t> next(npx);
        size_t fg_count = 0;
        for (size_t i = 0; i < npx; ++i) {
            next[i] = definite[i] ? alpha[i] : (net.source_side(first + static_cast<int>(i)) ? 1 : 0);
            fg_count += next[i];
        }

        // The reported energy sequence must never increase: roll back and stop
        // if this sweep made things worse (possible since the mixtures moved).
        if (energy > prev_energy || fg_count == 0) {
            alpha = prev_alpha;
            break;
        }
        prev_alpha = alpha = next;
        if (stats) {
            stats->energies.push_back(energy);
            stats->iterations = iter + 1;
        }
        double improve = (prev_energy - energy) / std::max(1.0, std::abs(prev_energy));
        prev_energy = energy;
        if (std::isfinite(improve) && improve < params.convergence_tol) break;
    }
    return to_mask(alpha);
}

PixelMask refine_detection_mask(const Image& img, const Detection& det,
                                const GrabCutParams& params, GrabCutStats* stats) {
    const PixelMask* mask = det.mask ? &*det.mask : nullptr;
    Trimap tri = init_trimap(img, det.bbox, mask, params.roi_margin, params.mask_erode_px,
                             params.mask_context_px);
    PixelMask roi_mask = grabcut(img, tri, params, stats);

    PixelMask out(det.bbox.width, det.bbox.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            int ix = det.bbox.left + x, iy = det.bbox.top + y;
            if (ix < tri.roi.left || ix >= tri.roi.right() || iy < tri.roi.top ||
                iy >= tri.roi.bottom())
                continue;
            out.set(x, y, roi_mask.at(ix - tri.roi.left, iy - tri.roi.top));
        }
    }
    if (out.popcount() == 0) {
        // Never hand back an empty mask: fall back to the input mask, else
        // claim the bbox center pixel.
        if (mask && mask->popcount() > 0) return *mask;
        out.set(out.width / 2, out.height / 2, 1);
    }
    return out;
}

PixelMask guarded_refine(const Image& img, const Detection& det, const GrabCutParams& params) {
    PixelMask refined = refine_detection_mask(img, det, params);
    if (det.mask && det.mask->popcount() > 0) {
        double ratio =
            static_cast<double>(refined.popcount()) / static_cast<double>(det.mask->popcount());
        if (ratio < 0.3 || ratio > 3.0) return *det.mask;
    }
    return refined;
}

Detection refine_detection(const Image& img, const Detection& det, const GrabCutParams& params) {
    const PixelMask* orig =
        det.mask && det.mask->popcount() > 0 ? &det.mask.value() : nullptr;
    if (!orig) return det;
    Trimap tri = init_trimap(img, det.bbox, orig, params.roi_margin, params.mask_erode_px,
                             params.mask_context_px);
    // A refit needs a trustworthy seed; when erosion wiped the mask the trimap
    // fell back to bbox-only (no DefiniteFg) and the cut has nothing solid to
    // anchor the support to.
    bool seeded = false;
    for (TrimapLabel l : tri.labels)
        if (l == TrimapLabel::DefiniteFg) {
            seeded = true;
            break;
        }
    if (!seeded) return det;
    PixelMask fg = grabcut(img, tri, params, nullptr);
    const int w = fg.width, h = fg.height;
    if (fg.popcount() == 0) return det;

    // Does ROI-local pixel (x, y) fall on the input mask?
    auto on_orig = [&](int x, int y) {
        if (!orig) return false;
        int mx = tri.roi.left + x - det.bbox.left;
        int my = tri.roi.top + y - det.bbox.top;
        return mx >= 0 && my >= 0 && mx < det.bbox.width && my < det.bbox.height &&
               orig->at(mx, my);
    };

    // Label 8-connected foreground components; note which touch the input mask.
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::int64_t> comp_size;
    std::vector<char> comp_touches;
    std::vector<std::pair<int, int>> stack;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!fg.at(sx, sy) || label[static_cast<std::size_t>(sy) * w + sx] != -1) continue;
            int id = static_cast<int>(comp_size.size());
            comp_size.push_back(0);
            comp_touches.push_back(0);
            stack.clear();
            stack.emplace_back(sx, sy);
            label[static_cast<std::size_t>(sy) * w + sx] = id;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                ++comp_size[id];
                if (on_orig(x, y)) comp_touches[id] = 1;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        std::size_t idx = static_cast<std::size_t>(ny) * w + nx;
                        if (!fg.at(nx, ny) || label[idx] != -1) continue;
                        label[idx] = id;
                        stack.emplace_back(nx, ny);
                    }
            }
        }
    }

    bool any_touch = false;
    for (char t : comp_touches) any_touch |= t != 0;
    int largest = 0;
    for (std::size_t i = 1; i < comp_size.size(); ++i)
        if (comp_size[i] > comp_size[largest]) largest = static_cast<int>(i);
    auto keep = [&](int id) {
        return any_touch ? comp_touches[id] != 0 : id == largest;
    };

    // Tight hull of the kept support, in ROI coordinates.
    int x0 = w, y0 = h, x1 = -1, y1 = -1;
    std::int64_t kept_px = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int id = label[static_cast<std::size_t>(y) * w + x];
            if (id < 0 || !keep(id)) continue;
            ++kept_px;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    if (kept_px == 0) return det;
    double ratio = static_cast<double>(kept_px) / static_cast<double>(orig->popcount());
    if (ratio < 0.3 || ratio > 3.0) return det;
    // The hull must explain the input box's extent; a support much smaller or
    // elsewhere means the cut recovered only a fragment of the artwork, and a
    // fragment-sized box is worse than the box the detector proposed.
    BBox hull{tri.roi.top + y0, tri.roi.left + x0, x1 - x0 + 1, y1 - y0 + 1};
    if (iou(hull, det.bbox) < 0.5) return det;

    // Seed retention: the seed is the detector's pixel evidence, and a cut
    // that erased part of it signals collapsed color models rather than a
    // better support. Require the kept components to cover nearly all of it.
    std::int64_t seed_total = 0, seed_kept = 0;
    for (int y = 0; y < det.bbox.height; ++y)
        for (int x = 0; x < det.bbox.width; ++x) {
            if (!orig->at(x, y)) continue;
            ++seed_total;
            int rx = det.bbox.left + x - tri.roi.left;
            int ry = det.bbox.top + y - tri.roi.top;
            if (rx < 0 || ry < 0 || rx >= w || ry >= h) continue;
            int id = label[static_cast<std::size_t>(ry) * w + rx];
            if (id >= 0 && keep(id)) ++seed_kept;
        }
    if (seed_kept < static_cast<std::int64_t>(0.95 * static_cast<double>(seed_total))) return det;

    Detection out = det;
    out.bbox = hull;
    PixelMask m(hull.width, hull.height);
    for (int y = 0; y < hull.height; ++y)
        for (int x = 0; x < hull.width; ++x) {
            int id = label[static_cast<std::size_t>(y0 + y) * w + (x0 + x)];
            if (id >= 0 && keep(id)) m.set(x, y, 1);
        }
    out.mask = std::move(m);
    return out;
}

}  // namespace segment
}  // namespace timelinekit
