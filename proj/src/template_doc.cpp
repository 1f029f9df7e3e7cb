#include "timelinekit/template_doc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "json_common.hpp"
#include "timelinekit/errors.hpp"
#include "timelinekit/reconstruct.hpp"
#include "timelinekit/wire.hpp"

namespace timelinekit {
namespace tpl {

using jsonio::json;

std::string to_string(TextRole r) { return r == TextRole::Title ? "Title" : "Body"; }

std::optional<TextRole> parse_text_role(const std::string& s) {
    if (s == "Title") return TextRole::Title;
    if (s == "Body") return TextRole::Body;
    return std::nullopt;
}

// ---- base64 ----------------------------------------------------------------

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::uint8_t* data, std::size_t n) {
    std::string out;
    out.reserve((n + 2) / 3 * 4);
    for (std::size_t i = 0; i < n; i += 3) {
        std::uint32_t v = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < n) v |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < n) v |= data[i + 2];
        out.push_back(kB64[(v >> 18) & 63]);
        out.push_back(kB64[(v >> 12) & 63]);
        out.push_back(i + 1 < n ? kB64[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < n ? kB64[v & 63] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    static const auto value_of = [] {
        std::array<int, 256> t{};
        t.fill(-1);
        for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kB64[i])] = i;
        return t;
    }();
    if (text.size() % 4 != 0) throw SchemaError("", "base64 length must be a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            char c = text[i + k];
            if (c == '=') {
                if (k < 2 || (k == 2 && text[i + 3] != '=')) {
                    throw SchemaError("", "malformed base64 padding");
                }
                ++pad;
                vals[k] = 0;
            } else {
                if (pad) throw SchemaError("", "base64 data after padding");
                vals[k] = value_of[static_cast<unsigned char>(c)];
                if (vals[k] < 0) throw SchemaError("", "invalid base64 character");
            }
        }
        std::uint32_t v = (static_cast<std::uint32_t>(vals[0]) << 18) |
                          (static_cast<std::uint32_t>(vals[1]) << 12) |
                          (static_cast<std::uint32_t>(vals[2]) << 6) |
                          static_cast<std::uint32_t>(vals[3]);
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    return out;
}

// ---- font attribute recovery -----------------------------------------------

namespace {

double luminance(Rgb c) { return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]; }

struct LumaSplit {
    std::vector<char> is_ink;  // per pixel of the clipped bbox, row-major
    BBox clipped;
    Rgb ink_mean{0, 0, 0};
};

// 1-D 2-means on luminance; ink = minority cluster (ties -> darker cluster).
LumaSplit split_ink(const Image& image, const BBox& bbox) {
    int x0 = std::max(0, bbox.left), y0 = std::max(0, bbox.top);
    int x1 = std::min(image.width, bbox.right()), y1 = std::min(image.height, bbox.bottom());
    if (x1 <= x0 || y1 <= y0) throw NotTextLike("bbox outside image");
    std::vector<double> lum;
    lum.reserve(static_cast<size_t>(x1 - x0) * (y1 - y0));
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) lum.push_back(luminance(image.get(x, y)));

    auto [mn_it, mx_it] = std::minmax_element(lum.begin(), lum.end());
    double mn = *mn_it, mx = *mx_it;
    if (mx - mn < 8.0) throw NotTextLike("single-color region");

    double c0 = mn, c1 = mx;
    std::vector<char> assign(lum.size(), 0);
    for (int iter = 0; iter < 32; ++iter) {
        bool changed = false;
        double s0 = 0, s1 = 0;
        int n0 = 0, n1 = 0;
        for (size_t i = 0; i < lum.size(); ++i) {
            char a = std::abs(lum[i] - c0) <= std::abs(lum[i] - c1) ? 0 : 1;
            if (a != assign[i]) {
                assign[i] = a;
                changed = true;
            }
            if (a == 0) {
                s0 += lum[i];
                ++n0;
            } else {
                s1 += lum[i];
                ++n1;
            }
        }
        if (n0 == 0 || n1 == 0) throw NotTextLike("luminance clustering collapsed");
        c0 = s0 / n0;
        c1 = s1 / n1;
        if (!changed) break;
    }
    int n0 = static_cast<int>(std::count(assign.begin(), assign.end(), 0));
    int n1 = static_cast<int>(assign.size()) - n0;
    // minority cluster is the ink; equal split -> the darker one
    char ink = n0 < n1 ? 0 : n1 < n0 ? 1 : (c0 < c1 ? 0 : 1);

    LumaSplit out;
    out.clipped = BBox{y0, x0, x1 - x0, y1 - y0};
    out.is_ink.resize(lum.size());
    double sr = 0, sg = 0, sb = 0;
    int cnt = 0;
    size_t i = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x, ++i) {
            out.is_ink[i] = assign[i] == ink;
            if (out.is_ink[i]) {
                Rgb c = image.get(x, y);
                sr += c[0];
                sg += c[1];
                sb += c[2];
                ++cnt;
            }
        }
    }
    out.ink_mean = {static_cast<std::uint8_t>(std::lround(sr / cnt)),
                    static_cast<std::uint8_t>(std::lround(sg / cnt)),
                    static_cast<std::uint8_t>(std::lround(sb / cnt))};
    return out;
}

}  // namespace

FontInfo extract_font_attrs(const Image& image, const BBox& bbox) {
    LumaSplit split = split_ink(image, bbox);
    int first_row = -1, last_row = -1;
    for (int y = 0; y < split.clipped.height; ++y) {
        bool any = false;
        for (int x = 0; x < split.clipped.width; ++x)
            if (split.is_ink[static_cast<size_t>(y) * split.clipped.width + x]) {
                any = true;
                break;
            }
        if (any) {
            if (first_row < 0) first_row = y;
            last_row = y;
        }
    }
    if (first_row < 0) throw NotTextLike("no ink rows");
    FontInfo f;
    f.size = std::max(4, last_row - first_row + 1);
    f.color = split.ink_mean;
    return f;
}

std::vector<TextRole> split_title_body(const std::vector<std::pair<BBox, FontInfo>>& texts) {
    std::vector<TextRole> roles(texts.size(), TextRole::Body);
    if (texts.empty()) return roles;
    int title = 0;
    for (size_t i = 1; i < texts.size(); ++i) {
        const auto& [bb, fb] = texts[static_cast<size_t>(title)];
        const auto& [bi, fi] = texts[i];
        if (fi.size > fb.size) {
            title = static_cast<int>(i);
        } else if (fi.size == fb.size) {
            // tie: earlier in reading order keeps the title
            if (bi.top < bb.top || (bi.top == bb.top && bi.left < bb.left))
                title = static_cast<int>(i);
        }
    }
    roles[static_cast<size_t>(title)] = TextRole::Title;
    return roles;
}

// ---- template extraction -----------------------------------------------------

namespace {

Rgb dominant_color(const Image& image) {
    std::unordered_map<std::uint32_t, int> counts;
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            Rgb c = image.get(x, y);
            std::uint32_t key = (static_cast<std::uint32_t>(c[0]) << 16) |
                                (static_cast<std::uint32_t>(c[1]) << 8) | c[2];
            ++counts[key];
        }
    std::uint32_t best = 0;
    int best_n = -1;
    for (auto [key, n] : counts)
        if (n > best_n || (n == best_n && key < best)) {
            best = key;
            best_n = n;
        }
    return Rgb{static_cast<std::uint8_t>((best >> 16) & 0xff),
               static_cast<std::uint8_t>((best >> 8) & 0xff),
               static_cast<std::uint8_t>(best & 0xff)};
}

ImageRgba cut_patch(const Image& image, const BBox& bbox, const PixelMask& mask, Rgb background) {
    ImageRgba patch(bbox.width, bbox.height);
    for (int y = 0; y < bbox.height; ++y) {
        for (int x = 0; x < bbox.width; ++x) {
            int ix = bbox.left + x, iy = bbox.top + y;
            Rgb c = (ix >= 0 && ix < image.width && iy >= 0 && iy < image.height) ? image.get(ix, iy)
                                                                                  : background;
            std::uint8_t* p = patch.px(x, y);
            p[0] = c[0];
            p[1] = c[1];
            p[2] = c[2];
            p[3] = mask.at(x, y) ? 255 : 0;
        }
    }
    return patch;
}

// mean color under a bbox-local mask
std::optional<Rgb> mean_under_mask(const Image& image, const BBox& bbox, const PixelMask& mask) {
    double sr = 0, sg = 0, sb = 0;
    int n = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            int ix = bbox.left + x, iy = bbox.top + y;
            if (ix < 0 || ix >= image.width || iy < 0 || iy >= image.height) continue;
            Rgb c = image.get(ix, iy);
            sr += c[0];
            sg += c[1];
            sb += c[2];
            ++n;
        }
    if (n == 0) return std::nullopt;
    return Rgb{static_cast<std::uint8_t>(std::lround(sr / n)),
               static_cast<std::uint8_t>(std::lround(sg / n)),
               static_cast<std::uint8_t>(std::lround(sb / n))};
}

bool is_text_category(ElementCategory c) {
    return c == ElementCategory::EventText || c == ElementCategory::AnnotationText;
}

}  // namespace

TemplateDoc extract_template(const Image& image, const GlobalInfo& global,
                             const std::vector<Detection>& dets, const ExtractParams& params) {
    std::vector<reconstruct::EventCluster> clusters;
    try {
        clusters = reconstruct::cluster_events(dets, global.orientation, {});
    } catch (const NoElements&) {
        throw NoEvents("detections contain no event content");
    }

    TemplateDoc doc;
    doc.canvas_width = image.width;
    doc.canvas_height = image.height;
    doc.background = dominant_color(image);
    doc.global = global;

    // order slots by body row (vertical layouts run column-major), then along
    // the orientation axis — this is data order for every synthesizable layout
    std::vector<int> bodies;
    for (size_t i = 0; i < dets.size(); ++i)
        if (dets[i].category == ElementCategory::MainBody) bodies.push_back(static_cast<int>(i));
    std::sort(bodies.begin(), bodies.end(), [&](int a, int b) {
        const BBox& ba = dets[static_cast<size_t>(a)].bbox;
        const BBox& bb = dets[static_cast<size_t>(b)].bbox;
        if (global.orientation == Orientation::Vertical) {
            if (ba.left != bb.left) return ba.left < bb.left;
            if (ba.top != bb.top) return ba.top < bb.top;
        } else {
            if (ba.top != bb.top) return ba.top < bb.top;
            if (ba.left != bb.left) return ba.left < bb.left;
        }
        return a < b;
    });
    auto body_rank = [&](const reconstruct::EventCluster& c) {
        if (bodies.empty()) return 0;
        double cx = c.anchor_box.left + c.anchor_box.width / 2.0;
        double cy = c.anchor_box.top + c.anchor_box.height / 2.0;
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t r = 0; r < bodies.size(); ++r) {
            const BBox& b = dets[static_cast<size_t>(bodies[r])].bbox;
            double dx = cx - (b.left + b.width / 2.0);
            double dy = cy - (b.top + b.height / 2.0);
            double d = dx * dx + dy * dy;
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(r);
            }
        }
        return best;
    };
    std::stable_sort(clusters.begin(), clusters.end(),
                     [&](const reconstruct::EventCluster& a, const reconstruct::EventCluster& b) {
                         int ra = body_rank(a), rb = body_rank(b);
                         if (ra != rb) return ra < rb;
                         return a.axis_pos < b.axis_pos;
                     });

    // one entry per detection that ends up in a table
    struct Ref {
        bool reusable = false;
        int index = -1;
    };
    std::vector<Ref> refs(dets.size());

    auto reusable_mask = [&](const Detection& d) -> PixelMask {
        if (params.refine_masks && (d.category == ElementCategory::EventMark ||
                                    d.category == ElementCategory::AnnotationMark)) {
            return segment::guarded_refine(image, d, params.grabcut);
        }
        if (d.mask) return *d.mask;
        return PixelMask(d.bbox.width, d.bbox.height, true);  // claim the whole bbox
    };

    auto add_entry = [&](int det_idx) {
        if (refs[static_cast<size_t>(det_idx)].index >= 0) return;
        const Detection& d = dets[static_cast<size_t>(det_idx)];
        if (is_reusable(d.category)) {
            ReusableElement e;
            e.category = d.category;
            e.bbox = d.bbox;
            e.mask = reusable_mask(d);
            // marks never own pixels claimed by overlapping text
            for (const Detection& t : dets) {
                if (!is_text_category(t.category) || !t.mask) continue;
                if (!intersect(d.bbox, t.bbox)) continue;
                for (int y = 0; y < t.mask->height; ++y)
                    for (int x = 0; x < t.mask->width; ++x) {
                        if (!t.mask->at(x, y)) continue;
                        int mx = t.bbox.left + x - d.bbox.left;
                        int my = t.bbox.top + y - d.bbox.top;
                        if (mx >= 0 && mx < e.mask.width && my >= 0 && my < e.mask.height)
                            e.mask.set(mx, my, 0);
                    }
            }
            e.patch = cut_patch(image, d.bbox, e.mask, doc.background);
            refs[static_cast<size_t>(det_idx)] = {true, static_cast<int>(doc.reusable.size())};
            doc.reusable.push_back(std::move(e));
        } else {
            UpdatableElement e;
            e.category = d.category;
            e.bbox = d.bbox;
            if (is_text_category(d.category)) {
                try {
                    e.font = extract_font_attrs(image, d.bbox);
                } catch (const NotTextLike&) {
                    e.font = std::nullopt;
                }
            } else if (d.category == ElementCategory::AnnotationIcon) {
                if (d.mask) e.ink = mean_under_mask(image, d.bbox, *d.mask);
                if (!e.ink) {
                    try {
                        e.ink = extract_font_attrs(image, d.bbox).color;
                    } catch (const NotTextLike&) {
                        e.ink = std::nullopt;
                    }
                }
            }
            PixelMask full(d.bbox.width, d.bbox.height, true);
            e.patch = cut_patch(image, d.bbox, d.mask ? *d.mask : full, doc.background);
            refs[static_cast<size_t>(det_idx)] = {false, static_cast<int>(doc.updatable.size())};
            doc.updatable.push_back(std::move(e));
        }
    };

    for (int b : bodies) add_entry(b);

    for (const reconstruct::EventCluster& c : clusters) {
        EventSlot slot;
        slot.anchor_box = c.anchor_box;
        slot.axis_pos = c.axis_pos;
        if (c.anchor >= 0) {
            add_entry(c.anchor);
            slot.anchor_reusable = refs[static_cast<size_t>(c.anchor)].index;
        }
        std::vector<std::pair<BBox, FontInfo>> slot_texts;
        std::vector<int> slot_text_entries;
        for (int m : c.members) {
            add_entry(m);
            const Ref& r = refs[static_cast<size_t>(m)];
            const BBox& b = dets[static_cast<size_t>(m)].bbox;
            slot.members.push_back(
                SlotMember{r.reusable, r.index, b.top - c.anchor_box.top, b.left - c.anchor_box.left});
            if (!r.reusable && is_text_category(dets[static_cast<size_t>(m)].category)) {
                const UpdatableElement& u = doc.updatable[static_cast<size_t>(r.index)];
                slot_texts.emplace_back(u.bbox, u.font.value_or(FontInfo{}));
                slot_text_entries.push_back(r.index);
            }
        }
        std::vector<TextRole> roles = split_title_body(slot_texts);
        for (size_t i = 0; i < slot_text_entries.size(); ++i)
            doc.updatable[static_cast<size_t>(slot_text_entries[i])].role = roles[i];
        doc.event_slots.push_back(std::move(slot));
    }
    return doc;
}

// ---- serialization ------------------------------------------------------------

namespace {

json rgba_png_json(const ImageRgba& img) {
    std::vector<std::uint8_t> bytes = encode_png(img);
    return base64_encode(bytes.data(), bytes.size());
}

ImageRgba parse_rgba_png(const json& v, const BBox& bbox, const std::string& path) {
    if (!v.is_string()) throw SchemaError(path, "expected base64 PNG");
    ImageRgba img;
    try {
        img = decode_png(base64_decode(v.get<std::string>()));
    } catch (const Error& e) {
        throw SchemaError(path, e.what());
    }
    if (img.width != bbox.width || img.height != bbox.height)
        throw SchemaError(path, "patch dimensions do not match bbox");
    return img;
}

}  // namespace

std::string serialize(const TemplateDoc& doc) {
    json j;
    j["schema_version"] = doc.schema_version;
    j["width"] = doc.canvas_width;
    j["height"] = doc.canvas_height;
    j["background"] = jsonio::rgb_json(doc.background);
    j["global"] = jsonio::global_json(doc.global);

    json reus = json::array();
    for (const ReusableElement& e : doc.reusable) {
        json v;
        v["category"] = timelinekit::to_string(e.category);
        v["bbox"] = jsonio::bbox_json(e.bbox);
        v["mask_rle"] = jsonio::mask_json(e.mask);
        v["patch_png"] = rgba_png_json(e.patch);
        reus.push_back(std::move(v));
    }
    j["reusable"] = std::move(reus);

    json upd = json::array();
    for (const UpdatableElement& e : doc.updatable) {
        json v;
        v["category"] = timelinekit::to_string(e.category);
        v["bbox"] = jsonio::bbox_json(e.bbox);
        if (e.font) {
            json f;
            f["size"] = e.font->size;
            f["color"] = jsonio::rgb_json(e.font->color);
            if (e.font->family) f["family"] = *e.font->family;
            v["font"] = std::move(f);
        }
        if (e.role) v["role"] = to_string(*e.role);
        if (e.ink) v["ink"] = jsonio::rgb_json(*e.ink);
        v["patch_png"] = rgba_png_json(e.patch);
        upd.push_back(std::move(v));
    }
    j["updatable"] = std::move(upd);

    json slots = json::array();
    for (const EventSlot& s : doc.event_slots) {
        json v;
        v["anchor_reusable"] = s.anchor_reusable;
        v["anchor_box"] = jsonio::bbox_json(s.anchor_box);
        v["axis_pos"] = s.axis_pos;
        json members = json::array();
        for (const SlotMember& m : s.members) {
            json mv;
            mv["table"] = m.is_reusable ? "reusable" : "updatable";
            mv["index"] = m.index;
            mv["dtop"] = m.dtop;
            mv["dleft"] = m.dleft;
            members.push_back(std::move(mv));
        }
        v["members"] = std::move(members);
        slots.push_back(std::move(v));
    }
    j["event_slots"] = std::move(slots);
    return j.dump(2) + "\n";
}

TemplateDoc deserialize(const std::string& text) {
    using jsonio::need;
    json j = jsonio::parse_or_throw(text);
    TemplateDoc doc;
    doc.schema_version = jsonio::need_int(need(j, "schema_version", "$"), "$.schema_version");
    if (doc.schema_version < 1) throw SchemaError("$.schema_version", "must be >= 1");
    doc.canvas_width = jsonio::need_int(need(j, "width", "$"), "$.width");
    doc.canvas_height = jsonio::need_int(need(j, "height", "$"), "$.height");
    if (doc.canvas_width < 1 || doc.canvas_height < 1)
        throw SchemaError("$", "canvas dimensions must be positive");
    doc.background = jsonio::parse_rgb(need(j, "background", "$"), "$.background");
    doc.global = jsonio::parse_global(need(j, "global", "$"), "global");

    const json& reus = need(j, "reusable", "$");
    if (!reus.is_array()) throw SchemaError("$.reusable", "expected an array");
    for (size_t i = 0; i < reus.size(); ++i) {
        std::string path = "reusable[" + std::to_string(i) + "]";
        const json& v = reus[i];
        ReusableElement e;
        e.category = jsonio::parse_category_or_throw(need(v, "category", path), path + ".category");
        if (!is_reusable(e.category))
            throw SchemaError(path + ".category", "category is not reusable");
        e.bbox = jsonio::parse_bbox(need(v, "bbox", path), path + ".bbox");
        e.mask = jsonio::parse_mask(need(v, "mask_rle", path), e.bbox, path + ".mask_rle");
        e.patch = parse_rgba_png(need(v, "patch_png", path), e.bbox, path + ".patch_png");
        doc.reusable.push_back(std::move(e));
    }

    const json& upd = need(j, "updatable", "$");
    if (!upd.is_array()) throw SchemaError("$.updatable", "expected an array");
    for (size_t i = 0; i < upd.size(); ++i) {
        std::string path = "updatable[" + std::to_string(i) + "]";
        const json& v = upd[i];
        UpdatableElement e;
        e.category = jsonio::parse_category_or_throw(need(v, "category", path), path + ".category");
        if (!is_updatable(e.category))
            throw SchemaError(path + ".category", "category is not updatable");
        e.bbox = jsonio::parse_bbox(need(v, "bbox", path), path + ".bbox");
        if (auto it = v.find("font"); it != v.end() && !it->is_null()) {
            FontInfo f;
            f.size = jsonio::need_int(need(*it, "size", path + ".font"), path + ".font.size");
            if (f.size < 4) throw SchemaError(path + ".font.size", "font size must be >= 4 px");
            f.color = jsonio::parse_rgb(need(*it, "color", path + ".font"), path + ".font.color");
            if (auto fam = it->find("family"); fam != it->end() && !fam->is_null()) {
                if (!fam->is_string())
                    throw SchemaError(path + ".font.family", "expected a string");
                f.family = fam->get<std::string>();
            }
            e.font = std::move(f);
        }
        if (auto it = v.find("role"); it != v.end() && !it->is_null()) {
            if (!it->is_string()) throw SchemaError(path + ".role", "expected Title or Body");
            auto r = parse_text_role(it->get<std::string>());
            if (!r) throw SchemaError(path + ".role", "expected Title or Body");
            e.role = *r;
        }
        if (auto it = v.find("ink"); it != v.end() && !it->is_null())
            e.ink = jsonio::parse_rgb(*it, path + ".ink");
        e.patch = parse_rgba_png(need(v, "patch_png", path), e.bbox, path + ".patch_png");
        doc.updatable.push_back(std::move(e));
    }

    const json& slots = need(j, "event_slots", "$");
    if (!slots.is_array()) throw SchemaError("$.event_slots", "expected an array");
    for (size_t i = 0; i < slots.size(); ++i) {
        std::string path = "event_slots[" + std::to_string(i) + "]";
        const json& v = slots[i];
        EventSlot s;
        s.anchor_reusable =
            jsonio::need_int(need(v, "anchor_reusable", path), path + ".anchor_reusable");
        if (s.anchor_reusable < -1 ||
            s.anchor_reusable >= static_cast<int>(doc.reusable.size()))
            throw SchemaError(path + ".anchor_reusable", "index out of range");
        s.anchor_box = jsonio::parse_bbox(need(v, "anchor_box", path), path + ".anchor_box");
        s.axis_pos = jsonio::need_number(need(v, "axis_pos", path), path + ".axis_pos");
        if (!std::isfinite(s.axis_pos)) throw SchemaError(path + ".axis_pos", "must be finite");
        const json& members = need(v, "members", path);
        if (!members.is_array()) throw SchemaError(path + ".members", "expected an array");
        for (size_t m = 0; m < members.size(); ++m) {
            std::string mpath = path + ".members[" + std::to_string(m) + "]";
            const json& mv = members[m];
            SlotMember sm;
            std::string table = jsonio::need_string(mv, "table", mpath);
            if (table == "reusable")
                sm.is_reusable = true;
            else if (table == "updatable")
                sm.is_reusable = false;
            else
                throw SchemaError(mpath + ".table", "expected reusable or updatable");
            sm.index = jsonio::need_int(need(mv, "index", mpath), mpath + ".index");
            int limit = sm.is_reusable ? static_cast<int>(doc.reusable.size())
                                       : static_cast<int>(doc.updatable.size());
            if (sm.index < 0 || sm.index >= limit)
                throw SchemaError(mpath + ".index", "index out of range");
            sm.dtop = jsonio::need_int(need(mv, "dtop", mpath), mpath + ".dtop");
            sm.dleft = jsonio::need_int(need(mv, "dleft", mpath), mpath + ".dleft");
            s.members.push_back(sm);
        }
        doc.event_slots.push_back(std::move(s));
    }
    return doc;
}

void save_template(const TemplateDoc& doc, const std::string& path) {
    wire::write_text_file(path, serialize(doc));
}

TemplateDoc load_template(const std::string& path) {
    return deserialize(wire::read_text_file(path));
}

}  // namespace tpl
}  // namespace timelinekit
