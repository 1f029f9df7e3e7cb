#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "timelinekit/glyphs.hpp"
#include "timelinekit/types.hpp"

namespace timelinekit {
namespace synth {

// Which optional per-event elements a design carries. Event marks and the
// main body always exist.
struct AnnotationSchema {
    bool event_text = true;
    bool annotation_mark = true;
    bool annotation_text = true;
    bool annotation_icon = false;

    bool operator==(const AnnotationSchema&) const = default;
};

struct StyleParams {
    Rgb background{255, 255, 255};
    Rgb axis_color{45, 45, 55};
    int axis_thickness = 4;

    glyphs::MarkShape mark_shape = glyphs::MarkShape::Circle;
    Rgb mark_color{214, 69, 65};
    int mark_size = 18;

    glyphs::MarkShape annotation_mark_shape = glyphs::MarkShape::Rect;
    Rgb annotation_mark_color{68, 108, 179};
    int annotation_mark_size = 12;

    int event_font_size = 12;       // time labels
    Rgb event_text_color{30, 30, 34};
    int annotation_font_size = 10;  // description labels
    Rgb annotation_text_color{90, 90, 100};

    Rgb icon_color{230, 126, 34};
    int icon_size = 16;

    bool alternate_sides = false;
    AnnotationSchema schema;

    bool operator==(const StyleParams&) const = default;
};

struct TimelineSpec {
    int canvas_width = 640;
    int canvas_height = 400;
    int n_events = 6;
    GlobalInfo global;
    StyleParams style;
};

struct SpecConstraints {
    std::optional<Representation> representation;
    std::optional<Scale> scale;
    std::optional<Layout> layout;
    std::optional<Orientation> orientation;
    std::optional<int> n_events;
    std::optional<std::pair<int, int>> canvas;
};

// Sample a viable spec. Throws InfeasibleConstraint when the pinned values
// contradict each other (non-viable design combo, too few events for the
// layout, Other orientation outside the freeform cases, ...).
TimelineSpec sample_spec(std::uint64_t seed, const SpecConstraints& constraints = {});

// Sample event data matching the spec (times fitting the scale, labels sized
// to the layout budget, icons when the schema wants them).
std::vector<EventDatum> sample_events(const TimelineSpec& spec, std::uint64_t seed);

// Deterministically rasterize the spec + data into a labeled bitmap. The
// returned ground truth is pixel-exact: drawing every element (in element
// order) over a background-filled canvas reproduces `image` bit for bit, and
// same-category masks never overlap. Throws LayoutOverflow when the elements
// cannot be placed on the canvas without forbidden overlap.
AnnotatedTimeline generate(const TimelineSpec& spec, const std::vector<EventDatum>& data,
                           std::uint64_t seed);

// The canonical text for a time value: integers print bare, anything else
// with one decimal. The renderer reuses this so re-rendered dates match the
// synthesized pixels.
std::string format_time(double t);

}  // namespace synth
}  // namespace timelinekit
