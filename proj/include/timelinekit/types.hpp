#pragma once

#include <array>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "timelinekit/geometry.hpp"
#include "timelinekit/image.hpp"

namespace timelinekit {

// The six element categories a timeline infographic decomposes into.
enum class ElementCategory {
    EventMark,        // dot/box/icon anchoring one event on the axis
    EventText,        // the time label of an event
    AnnotationMark,   // connector/flag attached to an event
    AnnotationText,   // description text of an event
    AnnotationIcon,   // pictogram attached to an event
    MainBody,         // the axis / backbone artwork itself
};

inline constexpr int kNumCategories = 6;

// Reusable elements carry style, not data: they can be cloned into a new
// timeline verbatim. Updatable elements carry per-event content and must be
// re-synthesized from new data.
bool is_reusable(ElementCategory c);
bool is_updatable(ElementCategory c);

const char* to_string(ElementCategory c);
std::optional<ElementCategory> parse_category(const std::string& s);
std::vector<ElementCategory> all_categories();

enum class Provenance { Detected, Recovered };
const char* to_string(Provenance p);

// One detector output (or repaired pseudo-detection). The mask, when present,
// is local to the bbox (mask dims == bbox dims).
struct Detection {
    ElementCategory category = ElementCategory::EventMark;
    double score = 0.0;
    BBox bbox;
    std::optional<PixelMask> mask;
    Provenance provenance = Provenance::Detected;

    bool operator==(const Detection&) const = default;
};

// ---- Global design descriptors --------------------------------------------

enum class Representation { Linear, Arbitrary };
enum class Scale { Chronological, Relative, Logarithmic, Sequential, SequentialInterim };
enum class Layout { Unified, Faceted, Segmented, FacetedSegmented };
enum class Orientation { Horizontal, Vertical, Other };

const char* to_string(Representation v);
const char* to_string(Scale v);
const char* to_string(Layout v);
const char* to_string(Orientation v);
std::optional<Representation> parse_representation(const std::string& s);
std::optional<Scale> parse_scale(const std::string& s);
std::optional<Layout> parse_layout(const std::string& s);
std::optional<Orientation> parse_orientation(const std::string& s);

struct GlobalInfo {
    Representation representation = Representation::Linear;
    Scale scale = Scale::Chronological;
    Layout layout = Layout::Unified;
    Orientation orientation = Orientation::Horizontal;

    bool operator==(const GlobalInfo&) const = default;
};

// A design is viable iff representation == Linear (any scale x layout), or the
// arbitrary-path special case Sequential x Unified (a freeform path has no
// meaningful metric axis or panel structure).
bool is_viable(Representation r, Scale s, Layout l);
std::vector<std::tuple<Representation, Scale, Layout>> viable_combinations();

// Classify the dominant direction of a point cloud by its principal axis:
// within 30 degrees of x -> Horizontal, within 30 of y -> Vertical, else
// Other. Point sets with no dominant axis (fewer than two points, zero or
// near-isotropic spread) are Other.
Orientation classify_orientation(const std::vector<std::pair<double, double>>& centers);

// ---- Ground truth ----------------------------------------------------------

struct Element {
    ElementCategory category = ElementCategory::EventMark;
    BBox bbox;
    PixelMask mask;  // bbox-local, dims == bbox dims

    bool operator==(const Element&) const = default;
};

// Fully labeled synthetic timeline: the bitmap plus every element with pixel-
// accurate mask, plus event grouping (indices into `elements`).
struct AnnotatedTimeline {
    Image image;
    GlobalInfo global;
    std::vector<Element> elements;
    std::vector<std::vector<int>> events;
};

// One event's data payload for rendering.
struct EventDatum {
    double time = 0.0;
    std::string label;
    std::optional<std::string> icon;  // glyph name, see glyphs.hpp

    bool operator==(const EventDatum&) const = default;
};

}  // namespace timelinekit
