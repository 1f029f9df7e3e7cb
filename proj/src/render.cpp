#include "timelinekit/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "timelinekit/errors.hpp"
#include "timelinekit/glyphs.hpp"
#include "timelinekit/scale.hpp"
#include "timelinekit/synth.hpp"
#include "timelinekit/template_doc.hpp"

namespace timelinekit {
namespace render {

namespace {

using tpl::TemplateDoc;

struct Pt {
    double x = 0, y = 0;
};

// One drawable: either an RGBA patch, or an ink mask in a solid color.
// Icons also carry their outline polygons (canvas coordinates) for the SVG.
struct SceneItem {
    ElementCategory category = ElementCategory::EventMark;
    BBox bbox;
    std::optional<ImageRgba> patch;
    std::optional<PixelMask> ink;
    Rgb color{0, 0, 0};
    bool is_icon = false;
    std::vector<std::vector<Pt>> icon_polys;
};

int iround(double v) { return static_cast<int>(std::llround(v)); }

ImageRgba scale_rgba(const ImageRgba& src, int nw, int nh) {
    if (nw == src.width && nh == src.height) return src;
    ImageRgba out(nw, nh);
    for (int y = 0; y < nh; ++y) {
        int sy = std::min(src.height - 1, static_cast<int>((y + 0.5) * src.height / nh));
        for (int x = 0; x < nw; ++x) {
            int sx = std::min(src.width - 1, static_cast<int>((x + 0.5) * src.width / nw));
            const std::uint8_t* s = src.px(sx, sy);
            std::uint8_t* d = out.px(x, y);
            d[0] = s[0];
            d[1] = s[1];
            d[2] = s[2];
            d[3] = s[3];
        }
    }
    return out;
}

void blit_patch(Image& canvas, const ImageRgba& patch, int top, int left) {
    for (int y = 0; y < patch.height; ++y) {
        int cy = top + y;
        if (cy < 0 || cy >= canvas.height) continue;
        for (int x = 0; x < patch.width; ++x) {
            int cx = left + x;
            if (cx < 0 || cx >= canvas.width) continue;
            const std::uint8_t* p = patch.px(x, y);
            if (p[3] >= 128) canvas.set(cx, cy, Rgb{p[0], p[1], p[2]});
        }
    }
}

void blit_ink(Image& canvas, const PixelMask& ink, int top, int left, Rgb color) {
    for (int y = 0; y < ink.height; ++y) {
        int cy = top + y;
        if (cy < 0 || cy >= canvas.height) continue;
        for (int x = 0; x < ink.width; ++x) {
            if (!ink.at(x, y)) continue;
            int cx = left + x;
            if (cx >= 0 && cx < canvas.width) canvas.set(cx, cy, color);
        }
    }
}

double luminance(Rgb c) { return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]; }

std::string hex_color(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

// Text fitted to a slot: shrink to 60% of the template size, then ellipsize.
struct FittedText {
    glyphs::TextRaster raster;
    std::string shown;
};

FittedText fit_text(const std::string& text, int size, int max_w) {
    FittedText out;
    out.shown = text;
    int floor_size = std::max(3, static_cast<int>(std::lround(size * 0.6)));
    for (int s = size; s >= floor_size; --s) {
        out.raster = glyphs::rasterize_text(text, s);
        if (!out.raster.has_ink || out.raster.ink_width() <= max_w) return out;
        if (s == floor_size) break;
    }
    std::string t = text;
    while (t.size() > 1) {
        t.pop_back();
        out.shown = t + "...";
        out.raster = glyphs::rasterize_text(out.shown, floor_size);
        if (out.raster.ink_width() <= max_w) return out;
    }
    out.shown = t;
    out.raster = glyphs::rasterize_text(t, floor_size);
    return out;
}

// Smallest icon raster whose tight crop best matches the requested dims.
struct FittedIcon {
    PixelMask ink;  // tight-cropped
    int full_size = 0;
    int crop_x = 0, crop_y = 0;
};

FittedIcon fit_icon(const std::string& name, int w, int h) {
    FittedIcon best;
    long long best_cost = -1;
    int lo = std::max(2, std::min(w, h) / 2);
    int hi = 2 * (w + h) + 16;
    for (int k = lo; k <= hi; ++k) {
        PixelMask full = glyphs::rasterize_icon(name, k, k);
        int ox = 0, oy = 0;
        PixelMask tight;
        try {
            tight = crop_tight(full, &ox, &oy);
        } catch (const DegenerateInput&) {
            continue;  // too small to leave ink
        }
        long long cost = std::llabs(tight.width - w) + std::llabs(tight.height - h);
        if (best_cost < 0 || cost < best_cost) {
            best_cost = cost;
            best.ink = std::move(tight);
            best.full_size = k;
            best.crop_x = ox;
            best.crop_y = oy;
            if (cost == 0) break;
        }
    }
    if (best_cost < 0) throw DegenerateInput("icon never rasterized any ink");
    return best;
}

std::vector<Pt> polyline_of(const std::vector<Pt>& anchors, Orientation orientation, int W, int H) {
    if (anchors.size() >= 2) {
        // drop consecutive duplicates so arc-length walking is well defined
        std::vector<Pt> pts;
        for (const Pt& p : anchors) {
            if (pts.empty() || std::abs(p.x - pts.back().x) + std::abs(p.y - pts.back().y) > 1e-9)
                pts.push_back(p);
        }
        if (pts.size() >= 2) return pts;
    }
    Pt c = anchors.empty() ? Pt{W / 2.0, H / 2.0} : anchors[0];
    if (orientation == Orientation::Vertical)
        return {Pt{c.x, 0.08 * H}, Pt{c.x, 0.92 * H}};
    return {Pt{0.08 * W, c.y}, Pt{0.92 * W, c.y}};
}

Pt walk_polyline(const std::vector<Pt>& pts, double arc) {
    double left = arc;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double dx = pts[i + 1].x - pts[i].x, dy = pts[i + 1].y - pts[i].y;
        double len = std::hypot(dx, dy);
        if (left <= len || i + 2 == pts.size()) {
            double t = len > 0 ? std::clamp(left / len, 0.0, 1.0) : 0.0;
            return Pt{pts[i].x + t * dx, pts[i].y + t * dy};
        }
        left -= len;
    }
    return pts.back();
}

double polyline_length(const std::vector<Pt>& pts) {
    double L = 0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        L += std::hypot(pts[i + 1].x - pts[i].x, pts[i + 1].y - pts[i].y);
    return L;
}

void append_svg_item(std::ostringstream& svg, const SceneItem& item) {
    if (item.patch) {
        std::vector<std::uint8_t> png = encode_png(*item.patch);
        svg << "  <image x=\"" << item.bbox.left << "\" y=\"" << item.bbox.top << "\" width=\""
            << item.bbox.width << "\" height=\"" << item.bbox.height
            << "\" image-rendering=\"pixelated\" href=\"data:image/png;base64,"
            << tpl::base64_encode(png.data(), png.size()) << "\"/>\n";
        return;
    }
    if (!item.ink) return;
    if (item.is_icon && !item.icon_polys.empty()) {
        svg << "  <path fill=\"" << hex_color(item.color) << "\" fill-rule=\"evenodd\" d=\"";
        char buf[64];
        for (const auto& poly : item.icon_polys) {
            for (size_t i = 0; i < poly.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%c%.2f %.2f", i == 0 ? 'M' : 'L', poly[i].x,
                              poly[i].y);
                svg << buf;
            }
            svg << "Z";
        }
        svg << "\"/>\n";
        return;
    }
    // text ink as per-row pixel runs
    svg << "  <g fill=\"" << hex_color(item.color) << "\">\n";
    for (int y = 0; y < item.ink->height; ++y) {
        int x = 0;
        while (x < item.ink->width) {
            if (!item.ink->at(x, y)) {
                ++x;
                continue;
            }
            int x0 = x;
            while (x < item.ink->width && item.ink->at(x, y)) ++x;
            svg << "    <rect x=\"" << item.bbox.left + x0 << "\" y=\"" << item.bbox.top + y
                << "\" width=\"" << x - x0 << "\" height=\"1\"/>\n";
        }
    }
    svg << "  </g>\n";
}

}  // namespace

RenderJob transfer_representation(RenderJob target, const tpl::TemplateDoc& source) {
    if (!target.options.allow_looping &&
        source.event_slots.size() < target.data.size())
        throw InsufficientSlots("representation source has " +
                                std::to_string(source.event_slots.size()) + " slots for " +
                                std::to_string(target.data.size()) + " events");
    target.options.representation_source = source;
    return target;
}

RenderResult render(const RenderJob& job) {
    const TemplateDoc& doc = job.doc;
    const std::vector<EventDatum>& data = job.data;
    const RenderOptions& opt = job.options;

    if (data.empty()) throw DegenerateInput("no event data");
    const int n = static_cast<int>(data.size());
    const int s = static_cast<int>(doc.event_slots.size());
    if (s == 0) throw TemplateIncomplete("template has no event slots");
    if (!opt.allow_looping && s < n)
        throw InsufficientSlots("template has " + std::to_string(s) + " slots for " +
                                std::to_string(n) + " events");
    if (doc.canvas_width < 1 || doc.canvas_height < 1)
        throw TemplateIncomplete("template has no canvas");

    const int W = opt.canvas_width.value_or(doc.canvas_width);
    const int H = opt.canvas_height.value_or(doc.canvas_height);
    if (W < 1 || H < 1) throw DegenerateInput("canvas dimensions must be positive");
    const double sx = static_cast<double>(W) / doc.canvas_width;
    const double sy = static_cast<double>(H) / doc.canvas_height;

    const TemplateDoc* src = opt.representation_source ? &*opt.representation_source : nullptr;
    if (src) {
        if (src->event_slots.empty())
            throw TemplateIncomplete("representation source has no event slots");
        if (!opt.allow_looping && static_cast<int>(src->event_slots.size()) < n)
            throw InsufficientSlots("representation source has " +
                                    std::to_string(src->event_slots.size()) + " slots for " +
                                    std::to_string(n) + " events");
        if (src->canvas_width < 1 || src->canvas_height < 1)
            throw TemplateIncomplete("representation source has no canvas");
    }

    std::vector<double> times;
    times.reserve(data.size());
    for (const EventDatum& d : data) times.push_back(d.time);
    for (size_t i = 1; i < times.size(); ++i)
        if (times[i] < times[i - 1]) throw DegenerateInput("event times must be sorted");

    const Scale scale = opt.scale_override.value_or(doc.global.scale);
    const bool verbatim = !src && !opt.scale_override && n == s && W == doc.canvas_width &&
                          H == doc.canvas_height;

    // --- anchor geometry ---------------------------------------------------
    std::vector<Pt> centers(static_cast<size_t>(n));
    std::vector<BBox> anchor_boxes(static_cast<size_t>(n));
    auto slot_anchor_dims = [&](int j, int* w, int* h) {
        const tpl::EventSlot& slot = doc.event_slots[static_cast<size_t>(j)];
        *w = std::max(1, iround(slot.anchor_box.width * sx));
        *h = std::max(1, iround(slot.anchor_box.height * sy));
    };

    if (verbatim) {
        for (int i = 0; i < n; ++i) {
            anchor_boxes[static_cast<size_t>(i)] = doc.event_slots[static_cast<size_t>(i)].anchor_box;
            const BBox& b = anchor_boxes[static_cast<size_t>(i)];
            centers[static_cast<size_t>(i)] = Pt{b.left + b.width / 2.0, b.top + b.height / 2.0};
        }
    } else if (src) {
        const double fx = static_cast<double>(W) / src->canvas_width;
        const double fy = static_cast<double>(H) / src->canvas_height;
        for (int i = 0; i < n; ++i) {
            const tpl::EventSlot& ss =
                src->event_slots[static_cast<size_t>(i) % src->event_slots.size()];
            Pt c{(ss.anchor_box.left + ss.anchor_box.width / 2.0) * fx,
                 (ss.anchor_box.top + ss.anchor_box.height / 2.0) * fy};
            int w, h;
            slot_anchor_dims(i % s, &w, &h);
            anchor_boxes[static_cast<size_t>(i)] =
                BBox{iround(c.y - h / 2.0), iround(c.x - w / 2.0), w, h};
            centers[static_cast<size_t>(i)] = c;
        }
    } else {
        std::vector<Pt> slot_centers;
        for (const tpl::EventSlot& slot : doc.event_slots)
            slot_centers.push_back(Pt{(slot.anchor_box.left + slot.anchor_box.width / 2.0) * sx,
                                      (slot.anchor_box.top + slot.anchor_box.height / 2.0) * sy});
        std::vector<Pt> path = polyline_of(slot_centers, doc.global.orientation, W, H);
        double L = polyline_length(path);
        ScaleDomain domain = ScaleDomain::from_times(times);
        for (int i = 0; i < n; ++i) {
            double value = scale == Scale::Sequential ? i : times[static_cast<size_t>(i)];
            double pos = scale_position(value, scale, domain, L);
            Pt c = walk_polyline(path, pos);
            int w, h;
            slot_anchor_dims(i % s, &w, &h);
            anchor_boxes[static_cast<size_t>(i)] =
                BBox{iround(c.y - h / 2.0), iround(c.x - w / 2.0), w, h};
            centers[static_cast<size_t>(i)] = c;
        }
    }

    // local tangents and the orientation axis, for the steep-path member flip
    Pt axis{1, 0};
    if (doc.global.orientation == Orientation::Vertical) axis = Pt{0, 1};
    if (doc.global.orientation == Orientation::Other && n >= 2) {
        double dx = centers[static_cast<size_t>(n - 1)].x - centers[0].x;
        double dy = centers[static_cast<size_t>(n - 1)].y - centers[0].y;
        double len = std::hypot(dx, dy);
        if (len > 1e-9) axis = Pt{dx / len, dy / len};
    }
    std::vector<bool> rotate(static_cast<size_t>(n), false);
    if (!verbatim && n >= 2) {
        for (int i = 0; i < n; ++i) {
            int a = i + 1 < n ? i : i - 1, b = i + 1 < n ? i + 1 : i;
            double dx = centers[static_cast<size_t>(b)].x - centers[static_cast<size_t>(a)].x;
            double dy = centers[static_cast<size_t>(b)].y - centers[static_cast<size_t>(a)].y;
            double len = std::hypot(dx, dy);
            if (len < 1e-9) continue;
            double cosang = std::abs((dx * axis.x + dy * axis.y) / len);
            rotate[static_cast<size_t>(i)] = cosang < 0.5;  // > 60 degrees off-axis
        }
    }

    // --- scene assembly ------------------------------------------------------
    std::vector<SceneItem> items;
    std::vector<std::vector<int>> events;

    // main body artwork: from the representation source when transferring
    const TemplateDoc& body_src = src ? *src : doc;
    const double bfx = src ? static_cast<double>(W) / src->canvas_width : sx;
    const double bfy = src ? static_cast<double>(H) / src->canvas_height : sy;
    for (const tpl::ReusableElement& e : body_src.reusable) {
        if (e.category != ElementCategory::MainBody) continue;
        SceneItem item;
        item.category = e.category;
        int w = std::max(1, iround(e.bbox.width * bfx));
        int h = std::max(1, iround(e.bbox.height * bfy));
        item.bbox = BBox{iround(e.bbox.top * bfy), iround(e.bbox.left * bfx), w, h};
        item.patch = scale_rgba(e.patch, w, h);
        items.push_back(std::move(item));
    }

    Rgb fallback_ink =
        luminance(doc.background) >= 128 ? Rgb{20, 20, 20} : Rgb{235, 235, 235};

    for (int i = 0; i < n; ++i) {
        std::vector<int> group;
        const tpl::EventSlot& slot = doc.event_slots[static_cast<size_t>(i % s)];
        const BBox& abox = anchor_boxes[static_cast<size_t>(i)];
        const Pt acenter{abox.left + abox.width / 2.0, abox.top + abox.height / 2.0};

        if (slot.anchor_reusable >= 0) {
            const tpl::ReusableElement& e =
                doc.reusable[static_cast<size_t>(slot.anchor_reusable)];
            SceneItem item;
            item.category = e.category;
            item.bbox = abox;
            item.patch = scale_rgba(e.patch, abox.width, abox.height);
            group.push_back(static_cast<int>(items.size()));
            items.push_back(std::move(item));
        }

        for (const tpl::SlotMember& m : slot.members) {
            // scaled offset and member dims
            int dtop = iround(m.dtop * sy), dleft = iround(m.dleft * sx);
            const BBox& mb = m.is_reusable
                                 ? doc.reusable[static_cast<size_t>(m.index)].bbox
                                 : doc.updatable[static_cast<size_t>(m.index)].bbox;
            int mw = std::max(1, iround(mb.width * sx));
            int mh = std::max(1, iround(mb.height * sy));
            int top, left;
            if (rotate[static_cast<size_t>(i)]) {
                double mcx = dleft + mw / 2.0 - abox.width / 2.0;
                double mcy = dtop + mh / 2.0 - abox.height / 2.0;
                left = iround(acenter.x + (-mcy) - mw / 2.0);
                top = iround(acenter.y + mcx - mh / 2.0);
            } else {
                top = abox.top + dtop;
                left = abox.left + dleft;
            }

            if (m.is_reusable) {
                const tpl::ReusableElement& e = doc.reusable[static_cast<size_t>(m.index)];
                SceneItem item;
                item.category = e.category;
                item.bbox = BBox{top, left, mw, mh};
                item.patch = scale_rgba(e.patch, mw, mh);
                group.push_back(static_cast<int>(items.size()));
                items.push_back(std::move(item));
                continue;
            }

            const tpl::UpdatableElement& e = doc.updatable[static_cast<size_t>(m.index)];
            if (e.category == ElementCategory::AnnotationIcon) {
                if (!data[static_cast<size_t>(i)].icon) continue;  // no icon in this datum
                FittedIcon icon = fit_icon(*data[static_cast<size_t>(i)].icon, mw, mh);
                SceneItem item;
                item.category = e.category;
                item.bbox = BBox{top + (mh - icon.ink.height) / 2, left + (mw - icon.ink.width) / 2,
                                 icon.ink.width, icon.ink.height};
                item.color = e.ink.value_or(fallback_ink);
                item.is_icon = true;
                double ox = item.bbox.left - icon.crop_x, oy = item.bbox.top - icon.crop_y;
                for (const auto& poly :
                     glyphs::icon_polygons(*data[static_cast<size_t>(i)].icon)) {
                    std::vector<Pt> placed;
                    placed.reserve(poly.size());
                    for (auto [px, py] : poly)
                        placed.push_back(Pt{ox + px * icon.full_size, oy + py * icon.full_size});
                    item.icon_polys.push_back(std::move(placed));
                }
                item.ink = std::move(icon.ink);
                group.push_back(static_cast<int>(items.size()));
                items.push_back(std::move(item));
                continue;
            }

            // text member
            std::string content = e.category == ElementCategory::EventText
                                      ? synth::format_time(data[static_cast<size_t>(i)].time)
                                      : data[static_cast<size_t>(i)].label;
            if (content.empty()) continue;
            tpl::FontInfo font = e.font.value_or(tpl::FontInfo{mh, fallback_ink, std::nullopt});
            int size = std::max(4, iround(font.size * sy));
            FittedText fitted = fit_text(content, size, mw);
            if (!fitted.raster.has_ink) continue;
            SceneItem item;
            item.category = e.category;
            int iw = fitted.raster.ink_width(), ih = fitted.raster.ink_height();
            item.bbox = BBox{top + (mh - ih) / 2, left + (mw - iw) / 2, iw, ih};
            PixelMask ink(iw, ih);
            for (int y = 0; y < ih; ++y)
                for (int x = 0; x < iw; ++x)
                    ink.set(x, y,
                            fitted.raster.mask.at(x + fitted.raster.ink_left,
                                                  y + fitted.raster.ink_top));
            item.ink = std::move(ink);
            item.color = font.color;
            group.push_back(static_cast<int>(items.size()));
            items.push_back(std::move(item));
        }
        events.push_back(std::move(group));
    }

    // --- output --------------------------------------------------------------
    RenderResult out;
    out.bitmap = Image(W, H, doc.background);
    for (const SceneItem& item : items) {
        if (item.patch)
            blit_patch(out.bitmap, *item.patch, item.bbox.top, item.bbox.left);
        else if (item.ink)
            blit_ink(out.bitmap, *item.ink, item.bbox.top, item.bbox.left, item.color);
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "  <rect width=\"" << W << "\" height=\"" << H << "\" fill=\""
        << hex_color(doc.background) << "\"/>\n";
    for (const SceneItem& item : items) append_svg_item(svg, item);
    svg << "</svg>\n";
    out.svg = svg.str();

    for (const SceneItem& item : items)
        out.elements.push_back(PlacedElement{item.category, item.bbox});
    out.events = std::move(events);
    return out;
}

}  // namespace render
}  // namespace timelinekit
