#include "timelinekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "timelinekit/errors.hpp"
#include "timelinekit/rng.hpp"
#include "timelinekit/scale.hpp"

namespace timelinekit {
namespace synth {

std::string format_time(double t) {
    char buf[40];
    if (std::abs(t - std::llround(t)) < 1e-9)
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(t)));
    else
        std::snprintf(buf, sizeof buf, "%.1f", t);
    return buf;
}

namespace {

using glyphs::MarkShape;

constexpr int kMargin = 44;    // axis inset from the canvas edge
constexpr int kAxisPad = 12;   // axis overhang past the first/last anchor
constexpr int kPad = 4;        // gap between stacked elements

double luminance(Rgb c) { return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]; }

struct PlacedElem {
    ElementCategory cat;
    BBox bbox;
    PixelMask mask;  // bbox-local
    Rgb color;
};

void blit(Image& img, const PlacedElem& e) {
    for (int y = 0; y < e.bbox.height; ++y) {
        int iy = e.bbox.top + y;
        if (iy < 0 || iy >= img.height) continue;
        for (int x = 0; x < e.bbox.width; ++x) {
            int ix = e.bbox.left + x;
            if (ix < 0 || ix >= img.width) continue;
            if (e.mask.at(x, y)) img.set(ix, iy, e.color);
        }
    }
}

using PointList = std::vector<std::pair<double, double>>;

double point_segment_dist_sq(double px, double py, double ax, double ay, double bx, double by) {
    double vx = bx - ax, vy = by - ay;
    double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0) : 0.0;
    double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
    return dx * dx + dy * dy;
}

// Coverage-rasterize a stroked polyline; returns the tight bbox-local mask.
PixelMask stroke_polyline(const PointList& pts, double radius, int cw, int ch, BBox* bbox) {
    if (pts.size() < 2) throw DegenerateInput("polyline needs two points");
    std::vector<std::uint8_t> candidate(static_cast<size_t>(cw) * ch, 0);
    for (size_t s = 0; s + 1 < pts.size(); ++s) {
        int x0 = std::max(0, static_cast<int>(std::floor(std::min(pts[s].first, pts[s + 1].first) - radius - 1)));
        int x1 = std::min(cw - 1, static_cast<int>(std::ceil(std::max(pts[s].first, pts[s + 1].first) + radius + 1)));
        int y0 = std::max(0, static_cast<int>(std::floor(std::min(pts[s].second, pts[s + 1].second) - radius - 1)));
        int y1 = std::min(ch - 1, static_cast<int>(std::ceil(std::max(pts[s].second, pts[s + 1].second) + radius + 1)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) candidate[static_cast<size_t>(y) * cw + x] = 1;
    }
    const double r2 = radius * radius;
    PixelMask full(cw, ch);
    for (int y = 0; y < ch; ++y) {
        for (int x = 0; x < cw; ++x) {
            if (!candidate[static_cast<size_t>(y) * cw + x]) continue;
            int hits = 0;
            for (int sy = 0; sy < 4; ++sy) {
                for (int sx = 0; sx < 4; ++sx) {
                    double px = x + (sx + 0.5) / 4.0, py = y + (sy + 0.5) / 4.0;
                    for (size_t s = 0; s + 1 < pts.size(); ++s) {
                        if (point_segment_dist_sq(px, py, pts[s].first, pts[s].second,
                                                  pts[s + 1].first, pts[s + 1].second) <= r2) {
                            ++hits;
                            break;
                        }
                    }
                }
            }
            if (hits >= 8) full.set(x, y, 1);
        }
    }
    int offx = 0, offy = 0;
    PixelMask tight = crop_tight(full, &offx, &offy);
    *bbox = BBox{offy, offx, tight.width, tight.height};
    return tight;
}

// ---- palettes ---------------------------------------------------------------

const std::vector<Rgb>& light_backgrounds() {
    static const std::vector<Rgb> v = {{255, 255, 255}, {250, 247, 240}, {245, 246, 250},
                                       {240, 236, 228}, {235, 242, 245}};
    return v;
}
const std::vector<Rgb>& dark_backgrounds() {
    static const std::vector<Rgb> v = {{28, 30, 38}, {24, 26, 30}, {38, 34, 44}};
    return v;
}
const std::vector<Rgb>& accents() {
    static const std::vector<Rgb> v = {{214, 69, 65},  {68, 108, 179}, {38, 166, 91},
                                       {230, 126, 34}, {155, 89, 182}, {22, 160, 133},
                                       {192, 57, 43},  {41, 128, 185}};
    return v;
}
const std::vector<Rgb>& dark_inks() {
    static const std::vector<Rgb> v = {{30, 30, 34}, {52, 52, 60}, {70, 74, 80}, {44, 62, 80}};
    return v;
}
const std::vector<Rgb>& light_inks() {
    static const std::vector<Rgb> v = {{240, 240, 244}, {225, 228, 235}, {250, 245, 235}};
    return v;
}

// Pick a palette color with enough luminance separation from the background.
Rgb pick_contrasting(Rng& rng, const std::vector<Rgb>& palette, Rgb bg, double min_gap) {
    for (int tries = 0; tries < 10; ++tries) {
        Rgb c = rng.pick(palette);
        if (std::abs(luminance(c) - luminance(bg)) >= min_gap) return c;
    }
    for (const Rgb& c : palette)
        if (std::abs(luminance(c) - luminance(bg)) >= min_gap) return c;
    return palette.front();
}

int rows_for_layout(Layout l) {
    switch (l) {
        case Layout::Unified: return 1;
        case Layout::Faceted:
        case Layout::Segmented: return 2;
        case Layout::FacetedSegmented: return 4;
    }
    return 1;
}

int min_events_for_layout(Layout l) { return rows_for_layout(l); }

// Rough per-event axis budget used to size fonts/marks before placement.
double slot_estimate(const TimelineSpec& spec) {
    int k = spec.global.representation == Representation::Arbitrary
                ? 1
                : rows_for_layout(spec.global.layout);
    int n_r = (spec.n_events + k - 1) / k;
    bool vertical = spec.global.orientation == Orientation::Vertical &&
                    spec.global.representation == Representation::Linear;
    double axis_len =
        (vertical ? spec.canvas_height : spec.canvas_width) - 2.0 * (kMargin + kAxisPad);
    return axis_len / std::max(1, n_r - 1 + 1);
}

const std::vector<std::string>& word_bank() {
    static const std::vector<std::string> v = {
        "Launch",  "Merger",   "Release", "Summit",  "Funding",  "Expansion", "Pilot",
        "Opening", "Award",    "Patent",  "Voyage",  "Redesign", "Rollout",   "Treaty",
        "Record",  "Milestone", "Debut",  "Upgrade", "Election", "Harvest",   "Tour",
        "Archive", "Contract", "Charter", "Transit", "Outpost",  "Relaunch",  "Review"};
    return v;
}

}  // namespace

// ---- sample_spec -------------------------------------------------------------

TimelineSpec sample_spec(std::uint64_t seed, const SpecConstraints& c) {
    Rng rng(derive_seed(seed, 0x5bec));
    TimelineSpec spec;

    // design combo
    std::vector<std::tuple<Representation, Scale, Layout>> combos;
    for (auto [r, s, l] : viable_combinations()) {
        if (c.representation && *c.representation != r) continue;
        if (c.scale && *c.scale != s) continue;
        if (c.layout && *c.layout != l) continue;
        combos.emplace_back(r, s, l);
    }
    if (combos.empty())
        throw InfeasibleConstraint("no viable design matches the pinned representation/scale/layout");
    auto [rep, scl, lay] = rng.pick(combos);
    spec.global.representation = rep;
    spec.global.scale = scl;
    spec.global.layout = lay;

    // orientation
    if (rep == Representation::Arbitrary) {
        // the path decides; reject an explicit Horizontal/Vertical pin since
        // a freeform path cannot promise it
        if (c.orientation && *c.orientation != Orientation::Other)
            throw InfeasibleConstraint("freeform representation cannot pin orientation");
        spec.global.orientation = Orientation::Other;
    } else if (c.orientation) {
        if (*c.orientation == Orientation::Other && lay != Layout::Unified)
            throw InfeasibleConstraint("diagonal axis requires a unified layout");
        spec.global.orientation = *c.orientation;
    } else {
        double u = rng.uniform();
        if (lay == Layout::Unified && u < 0.08)
            spec.global.orientation = Orientation::Other;
        else
            spec.global.orientation = u < 0.62 ? Orientation::Horizontal : Orientation::Vertical;
    }

    // events
    int min_n = std::max(3, min_events_for_layout(lay));
    if (c.n_events) {
        if (*c.n_events < 1) throw InfeasibleConstraint("n_events must be positive");
        if (*c.n_events < min_events_for_layout(lay))
            throw InfeasibleConstraint("too few events for the layout");
        spec.n_events = *c.n_events;
    } else {
        spec.n_events = static_cast<int>(rng.uniform_int(min_n, std::max(min_n, 8)));
    }

    // canvas
    if (c.canvas) {
        spec.canvas_width = c.canvas->first;
        spec.canvas_height = c.canvas->second;
        if (spec.canvas_width < 160 || spec.canvas_height < 120)
            throw InfeasibleConstraint("canvas too small");
    } else {
        bool vertical = spec.global.orientation == Orientation::Vertical;
        bool diagonal = spec.global.orientation == Orientation::Other &&
                        rep == Representation::Linear;
        int rows = rep == Representation::Arbitrary ? 1 : rows_for_layout(lay);
        if (diagonal) {
            spec.canvas_width = 560;
            spec.canvas_height = 560;
        } else if (vertical) {
            spec.canvas_width = rows <= 1 ? 420 : (rows == 2 ? 560 : 760);
            spec.canvas_height = 640;
        } else {
            spec.canvas_width = 680;
            spec.canvas_height = rows <= 1 ? 400 : (rows == 2 ? 520 : 760);
        }
    }

    // schema
    StyleParams& st = spec.style;
    st.schema.event_text = rng.chance(0.88);
    st.schema.annotation_mark = rng.chance(0.7);
    st.schema.annotation_text = rng.chance(0.82);
    st.schema.annotation_icon = rng.chance(0.38);
    if (!st.schema.event_text && !st.schema.annotation_text) st.schema.annotation_text = true;
    st.alternate_sides = rng.chance(0.25);

    // colors
    bool dark_mode = rng.chance(0.15);
    st.background = dark_mode ? rng.pick(dark_backgrounds()) : rng.pick(light_backgrounds());
    const std::vector<Rgb>& inks = dark_mode ? light_inks() : dark_inks();
    st.axis_color = pick_contrasting(rng, inks, st.background, 55.0);
    st.mark_color = pick_contrasting(rng, accents(), st.background, 40.0);
    st.annotation_mark_color = pick_contrasting(rng, accents(), st.background, 40.0);
    st.event_text_color = pick_contrasting(rng, inks, st.background, 55.0);
    st.annotation_text_color = pick_contrasting(rng, inks, st.background, 55.0);
    st.icon_color = pick_contrasting(rng, accents(), st.background, 40.0);

    // sizes from the per-event budget
    double slot = slot_estimate(spec);
    st.axis_thickness = static_cast<int>(rng.uniform_int(3, 6));
    int mark_base = static_cast<int>(std::clamp(slot * 0.42, 10.0, 24.0));
    st.mark_size = std::max(8, mark_base + static_cast<int>(rng.uniform_int(-2, 2)));
    st.annotation_mark_size = std::max(7, static_cast<int>(std::lround(st.mark_size * 0.72)));
    st.event_font_size = static_cast<int>(std::clamp(slot * 0.9 / 3.4, 8.0, 14.0));
    st.annotation_font_size =
        std::clamp(st.event_font_size - static_cast<int>(rng.uniform_int(0, 3)), 7, 13);
    st.icon_size = std::clamp(static_cast<int>(std::lround(st.mark_size * 0.95)), 12, 22);

    std::vector<MarkShape> shapes = glyphs::all_mark_shapes();
    st.mark_shape = rng.pick(shapes);
    st.annotation_mark_shape = rng.pick(shapes);
    return spec;
}

// ---- sample_events -------------------------------------------------------------

std::vector<EventDatum> sample_events(const TimelineSpec& spec, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0xda7a));
    const int n = spec.n_events;
    std::vector<EventDatum> data(static_cast<size_t>(n));

    // times
    double base = 1900 + static_cast<double>(rng.uniform_int(0, 115));
    if (spec.global.scale == Scale::Logarithmic) {
        // geometric gaps so log positions stay near-uniform
        double a = rng.uniform(1.0, 3.0), b = rng.uniform(1.7, 2.4);
        double prev = base;
        for (int i = 0; i < n; ++i) {
            double t = base + a * (std::pow(b, i) - 1.0);
            t = std::max(prev + 1.0, std::floor(t));
            data[static_cast<size_t>(i)].time = t;
            prev = t;
        }
    } else {
        double t = base;
        for (int i = 0; i < n; ++i) {
            data[static_cast<size_t>(i)].time = t;
            t += static_cast<double>(rng.uniform_int(1, 7));
        }
    }

    // labels within the slot budget
    double slot = slot_estimate(spec);
    int adv = glyphs::font_advance(spec.style.annotation_font_size);
    int max_chars = std::clamp(static_cast<int>(slot * 1.6 / std::max(1, adv)), 5, 16);
    for (int i = 0; i < n; ++i) {
        std::string label = rng.pick(word_bank());
        if (rng.chance(0.5)) {
            std::string extra =
                rng.chance(0.5) ? rng.pick(word_bank()) : std::to_string(rng.uniform_int(2, 99));
            if (static_cast<int>(label.size() + 1 + extra.size()) <= max_chars)
                label += " " + extra;
        }
        if (static_cast<int>(label.size()) > max_chars) label.resize(static_cast<size_t>(max_chars));
        data[static_cast<size_t>(i)].label = label;
        if (spec.style.schema.annotation_icon) {
            std::vector<std::string> names = glyphs::icon_names();
            data[static_cast<size_t>(i)].icon = rng.pick(names);
        }
    }
    return data;
}

// ---- generate -------------------------------------------------------------------

namespace {

struct EventGeom {
    double ax = 0.0, ay = 0.0;     // anchor (mark center), image coords
    double tangent_deg = 0.0;      // axis direction at the anchor, [0, 180)
    int row = 0;
    int local_index = 0;
};

double polyline_length(const PointList& pts) {
    double len = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        len += std::hypot(pts[i + 1].first - pts[i].first, pts[i + 1].second - pts[i].second);
    return len;
}

// Point + tangent at arc-length s along the polyline.
void polyline_at(const PointList& pts, double s, double* x, double* y, double* tangent_deg) {
    double acc = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double dx = pts[i + 1].first - pts[i].first, dy = pts[i + 1].second - pts[i].second;
        double seg = std::hypot(dx, dy);
        if (seg <= 0) continue;
        if (s <= acc + seg || i + 2 == pts.size()) {
            double t = std::clamp((s - acc) / seg, 0.0, 1.0);
            *x = pts[i].first + t * dx;
            *y = pts[i].second + t * dy;
            double ang = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
            if (ang < 0) ang += 180.0;
            if (ang >= 180.0) ang -= 180.0;
            *tangent_deg = ang;
            return;
        }
        acc += seg;
    }
    *x = pts.back().first;
    *y = pts.back().second;
    *tangent_deg = 0.0;
}

bool stack_is_vertical(double tangent_deg) {
    // stack perpendicular-ish to the local axis direction
    return tangent_deg <= 60.0 || tangent_deg >= 120.0;
}

}  // namespace

AnnotatedTimeline generate(const TimelineSpec& spec, const std::vector<EventDatum>& data,
                           std::uint64_t seed) {
    const int n = spec.n_events;
    if (n < 1) throw DegenerateInput("need at least one event");
    if (static_cast<int>(data.size()) != n)
        throw DegenerateInput("event data size does not match the spec");
    for (int i = 1; i < n; ++i)
        if (data[static_cast<size_t>(i)].time < data[static_cast<size_t>(i - 1)].time)
            throw DegenerateInput("event times must be sorted");
    if (!is_viable(spec.global.representation, spec.global.scale, spec.global.layout))
        throw InfeasibleConstraint("spec is not a viable design");
    const int cw = spec.canvas_width, ch = spec.canvas_height;
    const StyleParams& st = spec.style;
    Rng rng(derive_seed(seed, 0x9e0));

    const bool arbitrary = spec.global.representation == Representation::Arbitrary;
    const int k = arbitrary ? 1 : rows_for_layout(spec.global.layout);
    if (n < k) throw LayoutOverflow("fewer events than layout panels");
    const bool vertical = !arbitrary && spec.global.orientation == Orientation::Vertical;
    const bool diagonal = !arbitrary && spec.global.orientation == Orientation::Other;
    if (diagonal && spec.global.layout != Layout::Unified)
        throw InfeasibleConstraint("diagonal axis requires a unified layout");

    // --- event -> row, consecutive chunks
    std::vector<int> row_of(static_cast<size_t>(n)), local_of(static_cast<size_t>(n));
    std::vector<std::vector<int>> row_events(static_cast<size_t>(k));
    {
        int base = n / k, rem = n % k, idx = 0;
        for (int r = 0; r < k; ++r) {
            int cnt = base + (r < rem ? 1 : 0);
            for (int j = 0; j < cnt; ++j, ++idx) {
                row_of[static_cast<size_t>(idx)] = r;
                local_of[static_cast<size_t>(idx)] = j;
                row_events[static_cast<size_t>(r)].push_back(idx);
            }
        }
    }

    // --- per-row axis polyline + per-event anchors
    std::vector<PointList> row_paths(static_cast<size_t>(k));
    std::vector<EventGeom> geom(static_cast<size_t>(n));

    auto row_anchor_positions = [&](const std::vector<int>& members, double range) {
        std::vector<double> pos(members.size());
        std::vector<double> times;
        for (int e : members) times.push_back(data[static_cast<size_t>(e)].time);
        if (spec.global.scale == Scale::Sequential) {
            ScaleDomain d;
            d.n = static_cast<int>(members.size());
            for (size_t j = 0; j < members.size(); ++j)
                pos[j] = scale_position(static_cast<double>(j), Scale::Sequential, d, range);
        } else {
            ScaleDomain d = ScaleDomain::from_times(times);
            for (size_t j = 0; j < members.size(); ++j)
                pos[j] = scale_position(times[j], spec.global.scale, d, range);
        }
        return pos;
    };

    if (arbitrary) {
        PointList path;
        int kind = static_cast<int>(rng.uniform_int(0, 2));
        double x0 = kMargin, x1 = cw - kMargin;
        double cy = ch * 0.5;
        if (kind == 0) {  // wave
            double amp = ch * rng.uniform(0.10, 0.16);
            double freq = rng.uniform(1.0, 1.8);
            double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            for (int i = 0; i <= 28; ++i) {
                double t = static_cast<double>(i) / 28.0;
                path.emplace_back(x0 + t * (x1 - x0),
                                  cy + amp * std::sin(2.0 * std::numbers::pi * freq * t + phase));
            }
        } else if (kind == 1) {  // zigzag
            int knots = static_cast<int>(rng.uniform_int(4, 6));
            double amp = ch * rng.uniform(0.12, 0.17);
            for (int i = 0; i < knots; ++i) {
                double t = knots == 1 ? 0.5 : static_cast<double>(i) / (knots - 1);
                path.emplace_back(x0 + t * (x1 - x0), cy + ((i % 2) ? amp : -amp));
            }
        } else {  // staircase
            int steps = static_cast<int>(rng.uniform_int(2, 3));
            double amp = ch * rng.uniform(0.12, 0.17);
            double y_hi = cy - amp, y_lo = cy + amp;
            for (int i = 0; i <= steps; ++i) {
                double ta = static_cast<double>(i) / (steps + 1);
                double tb = static_cast<double>(i + 1) / (steps + 1);
                double y = (i % 2) ? y_lo : y_hi;
                path.emplace_back(x0 + ta * (x1 - x0), y);
                path.emplace_back(x0 + tb * (x1 - x0), y);
            }
        }
        row_paths[0] = path;
        double len = polyline_length(path);
        std::vector<double> pos = row_anchor_positions(row_events[0], len - 2.0 * kAxisPad);
        for (size_t j = 0; j < row_events[0].size(); ++j) {
            int e = row_events[0][j];
            EventGeom& g = geom[static_cast<size_t>(e)];
            polyline_at(path, kAxisPad + pos[j], &g.ax, &g.ay, &g.tangent_deg);
            g.row = 0;
            g.local_index = static_cast<int>(j);
        }
    } else if (diagonal) {
        bool rising = rng.chance(0.5);
        double ya = rising ? ch * 0.82 : ch * 0.18;
        double yb = rising ? ch * 0.18 : ch * 0.82;
        PointList path = {{static_cast<double>(kMargin), ya}, {static_cast<double>(cw - kMargin), yb}};
        row_paths[0] = path;
        double len = polyline_length(path);
        std::vector<double> pos = row_anchor_positions(row_events[0], len - 2.0 * kAxisPad);
        for (size_t j = 0; j < row_events[0].size(); ++j) {
            int e = row_events[0][j];
            EventGeom& g = geom[static_cast<size_t>(e)];
            polyline_at(path, kAxisPad + pos[j], &g.ax, &g.ay, &g.tangent_deg);
            g.row = 0;
            g.local_index = static_cast<int>(j);
        }
    } else {
        // horizontal or vertical rows; cross positions are filled in later
        // once stack extents are known, so store anchors in (u, row) form now.
        double u0 = kMargin + kAxisPad;
        double u1 = (vertical ? ch : cw) - kMargin - kAxisPad;
        for (int r = 0; r < k; ++r) {
            std::vector<double> pos = row_anchor_positions(row_events[static_cast<size_t>(r)], u1 - u0);
            for (size_t j = 0; j < row_events[static_cast<size_t>(r)].size(); ++j) {
                int e = row_events[static_cast<size_t>(r)][j];
                EventGeom& g = geom[static_cast<size_t>(e)];
                g.ax = u0 + pos[j];  // u coordinate for now
                g.tangent_deg = vertical ? 90.0 : 0.0;
                g.row = r;
                g.local_index = static_cast<int>(j);
            }
        }
    }

    // --- pre-rasterize per-event content
    struct EventRasters {
        PixelMask mark;
        int mark_w = 0, mark_h = 0;
        std::optional<glyphs::TextRaster> etext;
        std::optional<glyphs::TextRaster> atext;
        std::optional<PixelMask> amark;
        int amark_w = 0, amark_h = 0;
        std::optional<PixelMask> icon;
    };
    auto mark_dims = [](MarkShape s, int size, int* w, int* h) {
        switch (s) {
            case MarkShape::Rect:
                *w = size;
                *h = std::max(4, (3 * size) / 4);
                break;
            case MarkShape::Capsule:
                *w = std::max(6, (3 * size) / 2);
                *h = std::max(4, (3 * size) / 4);
                break;
            default:
                *w = size;
                *h = size;
        }
    };
    std::vector<EventRasters> rasters(static_cast<size_t>(n));
    for (int e = 0; e < n; ++e) {
        EventRasters& R = rasters[static_cast<size_t>(e)];
        mark_dims(st.mark_shape, st.mark_size, &R.mark_w, &R.mark_h);
        R.mark = glyphs::rasterize_mark(st.mark_shape, R.mark_w, R.mark_h);
        if (st.schema.event_text) {
            auto tr = glyphs::rasterize_text(format_time(data[static_cast<size_t>(e)].time),
                                             st.event_font_size);
            if (tr.has_ink) R.etext = std::move(tr);
        }
        if (st.schema.annotation_text && !data[static_cast<size_t>(e)].label.empty()) {
            auto tr = glyphs::rasterize_text(data[static_cast<size_t>(e)].label, st.annotation_font_size);
            if (tr.has_ink) R.atext = std::move(tr);
        }
        if (st.schema.annotation_mark) {
            mark_dims(st.annotation_mark_shape, st.annotation_mark_size, &R.amark_w, &R.amark_h);
            R.amark = glyphs::rasterize_mark(st.annotation_mark_shape, R.amark_w, R.amark_h);
        }
        if (st.schema.annotation_icon && data[static_cast<size_t>(e)].icon) {
            PixelMask full = glyphs::rasterize_icon(*data[static_cast<size_t>(e)].icon, st.icon_size,
                                                    st.icon_size);
            int ox = 0, oy = 0;
            R.icon = crop_tight(full, &ox, &oy);
        }
    }

    // --- stack extents (perpendicular to the axis), shared by band sizing
    // and placement. Extents depend on stacking direction.
    auto elem_extent = [&](int w, int h, bool vertical_stack) { return vertical_stack ? h : w; };
    auto annotation_extent = [&](const EventRasters& R, bool vstk) {
        int ext = 0;
        if (R.amark) ext += elem_extent(R.amark_w, R.amark_h, vstk) + kPad;
        if (R.atext) ext += elem_extent(R.atext->ink_width(), R.atext->ink_height(), vstk) + kPad;
        if (R.icon) ext += elem_extent(R.icon->width, R.icon->height, vstk) + kPad;
        return ext;
    };
    auto etext_extent = [&](const EventRasters& R, bool vstk) {
        return R.etext ? elem_extent(R.etext->ink_width(), R.etext->ink_height(), vstk) + kPad : 0;
    };

    // --- stagger decision per row: do neighbor texts collide along the axis?
    std::vector<bool> stagger_etext(static_cast<size_t>(k), false),
        stagger_ann(static_cast<size_t>(k), false);
    for (int r = 0; r < k; ++r) {
        const std::vector<int>& members = row_events[static_cast<size_t>(r)];
        double min_gap = 1e18;
        for (size_t j = 0; j + 1 < members.size(); ++j) {
            const EventGeom& a = geom[static_cast<size_t>(members[j])];
            const EventGeom& b = geom[static_cast<size_t>(members[j + 1])];
            double gap = (arbitrary || diagonal) ? std::hypot(b.ax - a.ax, b.ay - a.ay)
                                                 : (b.ax - a.ax);
            min_gap = std::min(min_gap, gap);
        }
        int max_et = 0, max_at = 0;
        for (int e : members) {
            const EventRasters& R = rasters[static_cast<size_t>(e)];
            bool vstk = stack_is_vertical(geom[static_cast<size_t>(e)].tangent_deg);
            // the along-axis footprint is the opposite of the stack extent
            if (R.etext)
                max_et = std::max(max_et, vstk ? R.etext->ink_width() : R.etext->ink_height());
            int at = 0;
            if (R.atext) at = std::max(at, vstk ? R.atext->ink_width() : R.atext->ink_height());
            if (R.amark) at = std::max(at, vstk ? R.amark_w : R.amark_h);
            if (R.icon) at = std::max(at, vstk ? R.icon->width : R.icon->height);
            max_at = std::max(max_at, at);
        }
        stagger_etext[static_cast<size_t>(r)] = min_gap < max_et + 6;
        stagger_ann[static_cast<size_t>(r)] = min_gap < max_at + 6;
    }

    // --- band geometry for straight rows: fix the cross position of each axis
    std::vector<double> row_cross(static_cast<size_t>(k), 0.0);
    if (!arbitrary && !diagonal) {
        double cross_total = vertical ? cw : ch;
        double band = cross_total / k;
        for (int r = 0; r < k; ++r) {
            // center the (above + mark + below) bundle inside the band
            int above = 0, below = 0, markc = 0;
            for (int e : row_events[static_cast<size_t>(r)]) {
                const EventRasters& R = rasters[static_cast<size_t>(e)];
                bool vstk = stack_is_vertical(geom[static_cast<size_t>(e)].tangent_deg);
                int ann = annotation_extent(R, vstk);
                int et = etext_extent(R, vstk);
                if (stagger_ann[static_cast<size_t>(r)] && R.atext)
                    ann += (vstk ? R.atext->ink_height() : R.atext->ink_width()) + kPad;
                if (stagger_etext[static_cast<size_t>(r)] && R.etext)
                    et += (vstk ? R.etext->ink_height() : R.etext->ink_width()) + kPad;
                bool flip = st.alternate_sides && (geom[static_cast<size_t>(e)].local_index % 2);
                above = std::max(above, flip ? et : ann);
                below = std::max(below, flip ? ann : et);
                markc = std::max(markc, elem_extent(R.mark_w, R.mark_h, vstk));
            }
            double need = above + below + markc + 8;
            if (need > band) throw LayoutOverflow("annotation stacks exceed the band");
            row_cross[static_cast<size_t>(r)] = band * r + (band - need) / 2.0 + above + markc / 2.0 + 4.0;
        }
        // finalize anchors in image coordinates
        for (int e = 0; e < n; ++e) {
            EventGeom& g = geom[static_cast<size_t>(e)];
            double u = g.ax, v = row_cross[static_cast<size_t>(g.row)];
            g.ax = vertical ? v : u;
            g.ay = vertical ? u : v;
        }
        for (int r = 0; r < k; ++r) {
            double v = row_cross[static_cast<size_t>(r)];
            double u0 = kMargin, u1 = (vertical ? ch : cw) - kMargin;
            if (vertical)
                row_paths[static_cast<size_t>(r)] = {{v, u0}, {v, u1}};
            else
                row_paths[static_cast<size_t>(r)] = {{u0, v}, {u1, v}};
        }
    }

    // --- place everything
    std::vector<PlacedElem> elems;
    std::vector<std::vector<int>> events(static_cast<size_t>(n));

    for (int r = 0; r < k; ++r) {
        BBox bb;
        PixelMask body = stroke_polyline(row_paths[static_cast<size_t>(r)], st.axis_thickness / 2.0,
                                         cw, ch, &bb);
        elems.push_back({ElementCategory::MainBody, bb, std::move(body), st.axis_color});
    }

    auto place_box = [&](double cx, double cy, int w, int h) {
        return BBox{static_cast<int>(std::llround(cy - h / 2.0)),
                    static_cast<int>(std::llround(cx - w / 2.0)), w, h};
    };
    auto clamp_along = [&](BBox b) {
        // keep boxes on-canvas along the axis direction (long labels at the ends)
        int dx = 0, dy = 0;
        if (b.left < 2) dx = 2 - b.left;
        if (b.right() > cw - 2) dx = (cw - 2) - b.right();
        if (b.top < 2) dy = 2 - b.top;
        if (b.bottom() > ch - 2) dy = (ch - 2) - b.bottom();
        b.left += dx;
        b.top += dy;
        return b;
    };

    for (int e = 0; e < n; ++e) {
        const EventGeom& g = geom[static_cast<size_t>(e)];
        const EventRasters& R = rasters[static_cast<size_t>(e)];
        bool vstk = stack_is_vertical(g.tangent_deg);
        int r = g.row;
        bool flip = st.alternate_sides && (g.local_index % 2);
        int ann_side = flip ? 1 : -1;  // -1 = up/left of the axis

        auto push = [&](ElementCategory cat, BBox bb, PixelMask mask, Rgb color) {
            events[static_cast<size_t>(e)].push_back(static_cast<int>(elems.size()));
            elems.push_back({cat, bb, std::move(mask), color});
        };

        // mark at the anchor
        push(ElementCategory::EventMark, place_box(g.ax, g.ay, R.mark_w, R.mark_h), R.mark,
             st.mark_color);

        double half_mark = (vstk ? R.mark_h : R.mark_w) / 2.0;

        auto stack_place = [&](int side, bool staggered, int tier_extent,
                               std::vector<std::tuple<ElementCategory, const PixelMask*, Rgb>> items) {
            double offset = half_mark + kPad;
            if (staggered && (g.local_index % 2)) offset += tier_extent;
            for (auto& [cat, mask, color] : items) {
                int w = mask->width, h = mask->height;
                double ext = vstk ? h : w;
                double cx = vstk ? g.ax : g.ax + side * (offset + ext / 2.0);
                double cy = vstk ? g.ay + side * (offset + ext / 2.0) : g.ay;
                BBox bb = clamp_along(place_box(cx, cy, w, h));
                push(cat, bb, *mask, color);
                offset += ext + kPad;
            }
        };

        // annotation stack: mark, text, icon outward from the axis
        {
            std::vector<std::tuple<ElementCategory, const PixelMask*, Rgb>> items;
            PixelMask atext_ink;
            if (R.amark) items.emplace_back(ElementCategory::AnnotationMark, &*R.amark,
                                            st.annotation_mark_color);
            if (R.atext) {
                int ox = 0, oy = 0;
                atext_ink = crop_tight(R.atext->mask, &ox, &oy);
                items.emplace_back(ElementCategory::AnnotationText, &atext_ink,
                                   st.annotation_text_color);
            }
            if (R.icon) items.emplace_back(ElementCategory::AnnotationIcon, &*R.icon, st.icon_color);
            int tier = R.atext ? (vstk ? R.atext->ink_height() : R.atext->ink_width()) + kPad : 10;
            stack_place(ann_side, stagger_ann[static_cast<size_t>(r)], tier, std::move(items));
        }

        // time label on the opposite side
        if (R.etext) {
            int ox = 0, oy = 0;
            PixelMask etext_ink = crop_tight(R.etext->mask, &ox, &oy);
            int tier = (vstk ? R.etext->ink_height() : R.etext->ink_width()) + kPad;
            std::vector<std::tuple<ElementCategory, const PixelMask*, Rgb>> items;
            items.emplace_back(ElementCategory::EventText, &etext_ink, st.event_text_color);
            stack_place(-ann_side, stagger_etext[static_cast<size_t>(r)], tier, std::move(items));
        }
    }

    // --- validations
    for (const PlacedElem& el : elems) {
        if (el.bbox.left < 0 || el.bbox.top < 0 || el.bbox.right() > cw || el.bbox.bottom() > ch)
            throw LayoutOverflow("element outside the canvas");
    }
    auto masks_touch = [&](const PlacedElem& a, const PlacedElem& b) {
        auto ib = intersect(a.bbox, b.bbox);
        if (!ib) return false;
        for (int y = ib->top; y < ib->bottom(); ++y)
            for (int x = ib->left; x < ib->right(); ++x)
                if (a.mask.at(x - a.bbox.left, y - a.bbox.top) &&
                    b.mask.at(x - b.bbox.left, y - b.bbox.top))
                    return true;
        return false;
    };
    for (size_t i = 0; i < elems.size(); ++i) {
        for (size_t j = i + 1; j < elems.size(); ++j) {
            const PlacedElem& a = elems[i];
            const PlacedElem& b = elems[j];
            bool a_body = a.cat == ElementCategory::MainBody;
            bool b_body = b.cat == ElementCategory::MainBody;
            if (a.cat == b.cat) {
                if (intersect(a.bbox, b.bbox)) throw LayoutOverflow("same-category overlap");
            } else if (a_body || b_body) {
                // marks sit on the axis by design; everything else must keep
                // its pixels off the body
                ElementCategory other = a_body ? b.cat : a.cat;
                if (other == ElementCategory::EventMark) continue;
                if (masks_touch(a, b)) throw LayoutOverflow("element drawn over the axis");
            } else {
                if (intersect(a.bbox, b.bbox)) throw LayoutOverflow("elements collide");
            }
        }
    }

    // --- draw
    AnnotatedTimeline out;
    out.image = Image(cw, ch, st.background);
    for (const PlacedElem& el : elems) blit(out.image, el);

    out.global = spec.global;
    if (arbitrary) {
        std::vector<std::pair<double, double>> centers;
        for (int e = 0; e < n; ++e) centers.emplace_back(geom[static_cast<size_t>(e)].ax,
                                                         geom[static_cast<size_t>(e)].ay);
        out.global.orientation = classify_orientation(centers);
    }
    out.elements.reserve(elems.size());
    for (PlacedElem& el : elems)
        out.elements.push_back({el.cat, el.bbox, std::move(el.mask)});
    out.events = std::move(events);
    return out;
}

}  // namespace synth
}  // namespace timelinekit
