#include "timelinekit/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "timelinekit/errors.hpp"

namespace timelinekit {
namespace reconstruct {

namespace {

double center_x(const BBox& b) { return b.left + b.width / 2.0; }
double center_y(const BBox& b) { return b.top + b.height / 2.0; }

// Deterministic ordering used everywhere a ranking is needed.
bool rank_less(double ka, const Detection& a, double kb, const Detection& b) {
    if (ka != kb) return ka > kb;
    if (a.bbox.area() != b.bbox.area()) return a.bbox.area() > b.bbox.area();
    if (a.bbox.top != b.bbox.top) return a.bbox.top < b.bbox.top;
    return a.bbox.left < b.bbox.left;
}

double overlap_over_min(const BBox& a, const BBox& b) {
    auto ib = intersect(a, b);
    if (!ib) return 0.0;
    return static_cast<double>(ib->area()) /
           static_cast<double>(std::min(a.area(), b.area()));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

std::vector<Detection> nms(const std::vector<Detection>& dets, double score_thresh,
                           double iou_thresh) {
    std::vector<const Detection*> pool;
    for (const Detection& d : dets)
        if (d.score >= score_thresh) pool.push_back(&d);
    std::stable_sort(pool.begin(), pool.end(), [](const Detection* a, const Detection* b) {
        return rank_less(a->score, *a, b->score, *b);
    });
    std::vector<Detection> kept;
    for (const Detection* d : pool) {
        bool suppressed = false;
        for (const Detection& k : kept) {
            if (k.category == d->category && iou(k.bbox, d->bbox) >= iou_thresh) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(*d);
    }
    return kept;
}

namespace {

// Union a bbox-local mask into a merged bbox-local mask.
void or_mask_into(PixelMask& dst, const BBox& dst_box, const PixelMask& src, const BBox& src_box) {
    for (int y = 0; y < src.height; ++y) {
        int dy = src_box.top + y - dst_box.top;
        if (dy < 0 || dy >= dst.height) continue;
        for (int x = 0; x < src.width; ++x) {
            if (!src.at(x, y)) continue;
            int dx = src_box.left + x - dst_box.left;
            if (dx < 0 || dx >= dst.width) continue;
            dst.set(dx, dy, 1);
        }
    }
}

}  // namespace

std::vector<Detection> nmm(const std::vector<Detection>& dets, double merge_thresh, int image_w,
                           int image_h) {
    if (image_w <= 0 || image_h <= 0) throw DegenerateInput("image dimensions must be positive");
    const double image_area = static_cast<double>(image_w) * image_h;
    auto rank_of = [&](const Detection& d) {
        return d.score + static_cast<double>(d.bbox.area()) / image_area;
    };
    std::vector<Detection> pool = dets;

    while (true) {
        std::stable_sort(pool.begin(), pool.end(), [&](const Detection& a, const Detection& b) {
            return rank_less(rank_of(a), a, rank_of(b), b);
        });
        bool merged_any = false;
        for (size_t i = 0; i < pool.size() && !merged_any; ++i) {
            std::vector<size_t> partners;
            for (size_t j = 0; j < pool.size(); ++j) {
                if (j == i || pool[j].category != pool[i].category) continue;
                if (overlap_over_min(pool[i].bbox, pool[j].bbox) >= merge_thresh)
                    partners.push_back(j);
            }
            if (partners.empty()) continue;

            Detection merged = pool[i];
            bool all_recovered = pool[i].provenance == Provenance::Recovered;
            for (size_t j : partners) {
                merged.bbox = union_bbox(merged.bbox, pool[j].bbox);
                merged.score = std::max(merged.score, pool[j].score);
                all_recovered = all_recovered && pool[j].provenance == Provenance::Recovered;
            }
            // union of all available masks, re-anchored to the union box
            bool any_mask = pool[i].mask.has_value();
            for (size_t j : partners) any_mask = any_mask || pool[j].mask.has_value();
            if (any_mask) {
                PixelMask m(merged.bbox.width, merged.bbox.height);
                if (pool[i].mask) or_mask_into(m, merged.bbox, *pool[i].mask, pool[i].bbox);
                for (size_t j : partners)
                    if (pool[j].mask) or_mask_into(m, merged.bbox, *pool[j].mask, pool[j].bbox);
                merged.mask = std::move(m);
            } else {
                merged.mask.reset();
            }
            merged.provenance = all_recovered ? Provenance::Recovered : Provenance::Detected;

            std::vector<Detection> next;
            next.reserve(pool.size() - partners.size());
            for (size_t j = 0; j < pool.size(); ++j) {
                if (j == i || std::find(partners.begin(), partners.end(), j) != partners.end())
                    continue;
                next.push_back(std::move(pool[j]));
            }
            next.push_back(std::move(merged));
            pool = std::move(next);
            merged_any = true;
        }
        if (!merged_any) break;
    }
    std::stable_sort(pool.begin(), pool.end(), [&](const Detection& a, const Detection& b) {
        return rank_less(rank_of(a), a, rank_of(b), b);
    });
    return pool;
}

double shape_consistency_cost(const std::vector<Detection>& dets) {
    double total = 0.0;
    int counted = 0;
    for (ElementCategory cat : all_categories()) {
        std::vector<double> aspects, areas;
        for (const Detection& d : dets) {
            if (d.category != cat) continue;
            aspects.push_back(static_cast<double>(d.bbox.width) / d.bbox.height);
            areas.push_back(static_cast<double>(d.bbox.area()));
        }
        if (aspects.size() < 2) continue;
        auto cv = [](const std::vector<double>& v) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            if (mean == 0.0) return 0.0;
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            var /= static_cast<double>(v.size());
            return std::sqrt(var) / mean;
        };
        total += cv(aspects) + cv(areas);
        ++counted;
    }
    return counted ? total / counted : 0.0;
}

std::vector<Detection> select_dedup(const std::vector<Detection>& nms_out,
                                    const std::vector<Detection>& nmm_out) {
    double cost_nms = shape_consistency_cost(nms_out);
    double cost_nmm = shape_consistency_cost(nmm_out);
    // ties go to the merge variant: contained duplicates should collapse
    return cost_nmm <= cost_nms + 1e-12 ? nmm_out : nms_out;
}

Orientation infer_orientation(const std::vector<Detection>& dets) {
    std::vector<std::pair<double, double>> centers;
    for (const Detection& d : dets)
        if (d.category == ElementCategory::EventMark)
            centers.emplace_back(center_x(d.bbox), center_y(d.bbox));
    if (centers.size() < 2) {
        centers.clear();
        for (const Detection& d : dets)
            if (d.category != ElementCategory::MainBody)
                centers.emplace_back(center_x(d.bbox), center_y(d.bbox));
    }
    return classify_orientation(centers);
}

namespace {

// Unit axis direction for projecting detections: x for Horizontal, y for
// Vertical, the principal direction of the point cloud for Other.
std::pair<double, double> axis_direction(const std::vector<std::pair<double, double>>& centers,
                                         Orientation orientation) {
    if (orientation == Orientation::Horizontal) return {1.0, 0.0};
    if (orientation == Orientation::Vertical) return {0.0, 1.0};
    const size_t n = centers.size();
    if (n < 2) return {1.0, 0.0};
    double mx = 0, my = 0;
    for (auto& [x, y] : centers) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double cxx = 0, cyy = 0, cxy = 0;
    for (auto& [x, y] : centers) {
        cxx += (x - mx) * (x - mx);
        cyy += (y - my) * (y - my);
        cxy += (x - mx) * (y - my);
    }
    if (cxx + cyy < 1e-12) return {1.0, 0.0};
    double theta = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
    return {std::cos(theta), std::sin(theta)};
}

}  // namespace

std::vector<EventCluster> cluster_events(const std::vector<Detection>& dets,
                                         Orientation orientation, const RepairParams& params) {
    std::vector<int> items;  // non-body detections
    for (size_t i = 0; i < dets.size(); ++i)
        if (dets[i].category != ElementCategory::MainBody) items.push_back(static_cast<int>(i));
    if (items.empty()) throw NoElements("no detections to cluster");

    std::vector<std::pair<double, double>> centers;
    for (int i : items) centers.emplace_back(center_x(dets[static_cast<size_t>(i)].bbox),
                                             center_y(dets[static_cast<size_t>(i)].bbox));
    auto [ux, uy] = axis_direction(centers, orientation);
    auto proj = [&](const BBox& b) { return center_x(b) * ux + center_y(b) * uy; };

    std::vector<int> anchors;
    for (int i : items)
        if (dets[static_cast<size_t>(i)].category == ElementCategory::EventMark) anchors.push_back(i);

    std::vector<EventCluster> clusters;
    if (!anchors.empty()) {
        std::sort(anchors.begin(), anchors.end(), [&](int a, int b) {
            double pa = proj(dets[static_cast<size_t>(a)].bbox);
            double pb = proj(dets[static_cast<size_t>(b)].bbox);
            if (pa != pb) return pa < pb;
            return a < b;
        });
        for (int a : anchors) {
            EventCluster c;
            c.anchor = a;
            c.anchor_box = dets[static_cast<size_t>(a)].bbox;
            c.axis_pos = proj(c.anchor_box);
            clusters.push_back(std::move(c));
        }
        for (int i : items) {
            if (dets[static_cast<size_t>(i)].category == ElementCategory::EventMark) continue;
            double cx = center_x(dets[static_cast<size_t>(i)].bbox);
            double cy = center_y(dets[static_cast<size_t>(i)].bbox);
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (size_t c = 0; c < clusters.size(); ++c) {
                const BBox& ab = clusters[c].anchor_box;
                double dx = cx - center_x(ab), dy = cy - center_y(ab);
                double d = dx * dx + dy * dy;
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            clusters[static_cast<size_t>(best)].members.push_back(i);
        }
    } else {
        // gap clustering along the axis
        std::vector<int> order = items;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double pa = proj(dets[static_cast<size_t>(a)].bbox);
            double pb = proj(dets[static_cast<size_t>(b)].bbox);
            if (pa != pb) return pa < pb;
            return a < b;
        });
        std::vector<double> extents;
        for (int i : order) {
            const BBox& b = dets[static_cast<size_t>(i)].bbox;
            double ext = std::abs(b.width * ux) + std::abs(b.height * uy);
            extents.push_back(ext);
        }
        double med_ext = median(extents);
        double gap_limit = params.gap_factor * std::max(1.0, med_ext);

        std::vector<std::vector<int>> groups;
        for (size_t k = 0; k < order.size(); ++k) {
            double p = proj(dets[static_cast<size_t>(order[k])].bbox);
            if (k == 0 ||
                p - proj(dets[static_cast<size_t>(order[k - 1])].bbox) > gap_limit)
                groups.emplace_back();
            groups.back().push_back(order[k]);
        }
        for (const std::vector<int>& g : groups) {
            EventCluster c;
            double sx = 0, sy = 0, sp = 0;
            for (int i : g) {
                sx += center_x(dets[static_cast<size_t>(i)].bbox);
                sy += center_y(dets[static_cast<size_t>(i)].bbox);
                sp += proj(dets[static_cast<size_t>(i)].bbox);
            }
            double inv = 1.0 / static_cast<double>(g.size());
            c.anchor = -1;
            c.anchor_box = BBox{static_cast<int>(std::llround(sy * inv)),
                                static_cast<int>(std::llround(sx * inv)), 1, 1};
            c.axis_pos = sp * inv;
            c.members = g;
            clusters.push_back(std::move(c));
        }
    }
    std::sort(clusters.begin(), clusters.end(), [](const EventCluster& a, const EventCluster& b) {
        if (a.axis_pos != b.axis_pos) return a.axis_pos < b.axis_pos;
        return a.anchor < b.anchor;
    });
    return clusters;
}

namespace {

bool cluster_has_category(const EventCluster& c, const std::vector<Detection>& dets,
                          ElementCategory cat) {
    if (c.anchor >= 0 && dets[static_cast<size_t>(c.anchor)].category == cat) return true;
    for (int m : c.members)
        if (dets[static_cast<size_t>(m)].category == cat) return true;
    return false;
}

int category_presence(const std::vector<EventCluster>& clusters,
                      const std::vector<Detection>& dets, ElementCategory cat) {
    int n = 0;
    for (const EventCluster& c : clusters)
        if (cluster_has_category(c, dets, cat)) ++n;
    return n;
}

}  // namespace

std::vector<Detection> fix_misclassified(const std::vector<Detection>& dets,
                                         const std::vector<EventCluster>& clusters,
                                         const RepairParams& params) {
    std::vector<Detection> out = dets;
    const int n_clusters = static_cast<int>(clusters.size());
    if (n_clusters == 0) return out;

    // presence/minority computed on the input snapshot so the pass is
    // order-independent across categories
    std::vector<bool> minority(static_cast<size_t>(kNumCategories), false);
    std::vector<int> presence(static_cast<size_t>(kNumCategories), 0);
    for (ElementCategory cat : all_categories()) {
        int p = category_presence(clusters, dets, cat);
        presence[static_cast<size_t>(cat)] = p;
        minority[static_cast<size_t>(cat)] = 2 * p <= n_clusters;
    }

    for (ElementCategory cat : all_categories()) {
        if (cat == ElementCategory::MainBody || cat == ElementCategory::EventMark) continue;
        if (minority[static_cast<size_t>(cat)]) continue;  // needs a strict majority

        std::vector<double> aspects, areas;
        for (const EventCluster& c : clusters) {
            for (int m : c.members) {
                const Detection& d = dets[static_cast<size_t>(m)];
                if (d.category != cat) continue;
                aspects.push_back(static_cast<double>(d.bbox.width) / d.bbox.height);
                areas.push_back(static_cast<double>(d.bbox.area()));
            }
        }
        if (aspects.empty()) continue;
        double med_aspect = median(aspects);
        double med_area = median(areas);
        if (med_aspect <= 0 || med_area <= 0) continue;

        for (const EventCluster& c : clusters) {
            if (cluster_has_category(c, dets, cat)) continue;
            int best = -1;
            double best_dev = std::numeric_limits<double>::infinity();
            for (int m : c.members) {
                const Detection& d = dets[static_cast<size_t>(m)];
                if (d.category == cat) continue;
                if (!minority[static_cast<size_t>(d.category)]) continue;  // don't steal majors
                if (out[static_cast<size_t>(m)].category != d.category) continue;  // already voted
                double aspect_dev =
                    std::abs(static_cast<double>(d.bbox.width) / d.bbox.height / med_aspect - 1.0);
                double area_dev =
                    std::abs(static_cast<double>(d.bbox.area()) / med_area - 1.0);
                if (aspect_dev > params.vote_aspect_tol || area_dev > params.vote_area_tol)
                    continue;
                double dev = aspect_dev + area_dev;
                if (dev < best_dev) {
                    best_dev = dev;
                    best = m;
                }
            }
            if (best >= 0) out[static_cast<size_t>(best)].category = cat;
        }
    }
    return out;
}

std::vector<Detection> recover_missing(const std::vector<Detection>& dets,
                                       const std::vector<EventCluster>& clusters,
                                       const RepairParams& params) {
    std::vector<Detection> out = dets;
    const int n_clusters = static_cast<int>(clusters.size());
    if (n_clusters == 0) return out;

    for (ElementCategory cat : all_categories()) {
        if (cat == ElementCategory::MainBody) continue;
        int present = category_presence(clusters, dets, cat);
        if (2 * present <= n_clusters) continue;

        // one representative per cluster: the instance nearest its anchor
        std::vector<double> dtops, dlefts, widths, heights;
        for (const EventCluster& c : clusters) {
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            auto consider = [&](int idx) {
                const Detection& d = dets[static_cast<size_t>(idx)];
                if (d.category != cat) return;
                double dx = center_x(d.bbox) - center_x(c.anchor_box);
                double dy = center_y(d.bbox) - center_y(c.anchor_box);
                double dist = dx * dx + dy * dy;
                if (dist < best_d) {
                    best_d = dist;
                    best = idx;
                }
            };
            if (c.anchor >= 0) consider(c.anchor);
            for (int m : c.members) consider(m);
            if (best < 0) continue;
            const BBox& b = dets[static_cast<size_t>(best)].bbox;
            dtops.push_back(b.top - c.anchor_box.top);
            dlefts.push_back(b.left - c.anchor_box.left);
            widths.push_back(b.width);
            heights.push_back(b.height);
        }
        if (dtops.empty()) continue;
        int med_dtop = static_cast<int>(std::llround(median(dtops)));
        int med_dleft = static_cast<int>(std::llround(median(dlefts)));
        int med_w = std::max(1, static_cast<int>(std::llround(median(widths))));
        int med_h = std::max(1, static_cast<int>(std::llround(median(heights))));

        for (const EventCluster& c : clusters) {
            if (cluster_has_category(c, dets, cat)) continue;
            Detection d;
            d.category = cat;
            d.score = params.recovered_score;
            d.provenance = Provenance::Recovered;
            d.bbox = BBox{c.anchor_box.top + med_dtop, c.anchor_box.left + med_dleft, med_w, med_h};
            out.push_back(std::move(d));
        }
    }
    return out;
}

std::vector<Detection> repair(const std::vector<Detection>& dets, int image_w, int image_h,
                              const RepairParams& params, RepairTrace* trace) {
    std::vector<Detection> kept = nms(dets, params.nms_score_thresh, params.nms_iou_thresh);
    std::vector<Detection> merged = nmm(dets, params.nmm_merge_thresh, image_w, image_h);
    std::vector<Detection> dedup = select_dedup(kept, merged);
    bool chose_merge = shape_consistency_cost(merged) <= shape_consistency_cost(kept) + 1e-12;

    Orientation orientation = infer_orientation(dedup);
    std::vector<Detection> result;
    std::vector<Detection> voted;
    try {
        std::vector<EventCluster> clusters = cluster_events(dedup, orientation, params);
        voted = fix_misclassified(dedup, clusters, params);
        result = recover_missing(voted, clusters, params);
    } catch (const NoElements&) {
        voted = dedup;
        result = dedup;  // nothing but body detections: nothing to repair
    }
    if (trace) {
        trace->raw = dets;
        trace->after_nms = std::move(kept);
        trace->after_nmm = std::move(merged);
        trace->after_dedup = std::move(dedup);
        trace->chose_merge = chose_merge;
        trace->orientation = orientation;
        trace->after_vote = std::move(voted);
        trace->after_recover = result;
    }
    return result;
}

}  // namespace reconstruct
}  // namespace timelinekit
