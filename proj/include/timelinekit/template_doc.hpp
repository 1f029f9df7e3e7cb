#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "timelinekit/image.hpp"
#include "timelinekit/segment.hpp"
#include "timelinekit/types.hpp"

namespace timelinekit {
namespace tpl {

inline constexpr int kSchemaVersion = 1;

// Text styling recovered from pixels. Size is the glyph row extent in px;
// family comes from an external lookup hook and defaults to absent.
struct FontInfo {
    int size = 0;
    Rgb color{0, 0, 0};
    std::optional<std::string> family;
    bool operator==(const FontInfo&) const = default;
};

enum class TextRole { Title, Body };
std::string to_string(TextRole r);
std::optional<TextRole> parse_text_role(const std::string& s);

// Artwork carried over verbatim into new renders: marks and the main body.
struct ReusableElement {
    ElementCategory category = ElementCategory::EventMark;
    BBox bbox;
    PixelMask mask;   // bbox-local, segmentation-refined
    ImageRgba patch;  // bbox-sized crop, alpha = mask
    bool operator==(const ReusableElement&) const = default;
};

// Content slots refilled from user data: texts and icons. The original
// pixels are kept as a patch so later hooks (OCR, font lookup) can use them.
struct UpdatableElement {
    ElementCategory category = ElementCategory::EventText;
    BBox bbox;
    std::optional<FontInfo> font;  // texts
    std::optional<TextRole> role;  // texts
    std::optional<Rgb> ink;        // icon foreground color
    ImageRgba patch;
    bool operator==(const UpdatableElement&) const = default;
};

// One placed element inside an event slot, addressed by table + index, at a
// fixed offset from the slot anchor's top-left corner.
struct SlotMember {
    bool is_reusable = false;
    int index = 0;
    int dtop = 0;
    int dleft = 0;
    bool operator==(const SlotMember&) const = default;
};

// Per-event grouping: the anchor mark (if any) plus satellite members.
struct EventSlot {
    int anchor_reusable = -1;  // index into reusable, or -1 when anchor-less
    BBox anchor_box;           // anchor bbox; 1x1 centroid box when anchor-less
    double axis_pos = 0.0;     // projection on the orientation axis
    std::vector<SlotMember> members;
    bool operator==(const EventSlot&) const = default;
};

struct TemplateDoc {
    int schema_version = kSchemaVersion;
    int canvas_width = 0;
    int canvas_height = 0;
    Rgb background{255, 255, 255};
    GlobalInfo global;
    std::vector<ReusableElement> reusable;
    std::vector<UpdatableElement> updatable;
    std::vector<EventSlot> event_slots;
    bool operator==(const TemplateDoc&) const = default;
};

struct ExtractParams {
    segment::GrabCutParams grabcut;
    bool refine_masks = true;  // run segmentation refinement on compact artwork
};

// Build the template from an image, its design descriptor, and repaired
// detections. Slots are ordered by body row (top-to-bottom for horizontal
// layouts, left-to-right for vertical) then along the orientation axis.
// Throws NoEvents when the detections contain no event content.
TemplateDoc extract_template(const Image& image, const GlobalInfo& global,
                             const std::vector<Detection>& dets, const ExtractParams& params = {});

// Estimate font size/color inside a text bbox by 2-means on luminance; the
// minority cluster is the ink. Throws NotTextLike when the split is degenerate.
FontInfo extract_font_attrs(const Image& image, const BBox& bbox);

// Largest font becomes the Title, the rest Body; ties resolve by reading
// order (the earlier box wins). Single text -> Title.
std::vector<TextRole> split_title_body(const std::vector<std::pair<BBox, FontInfo>>& texts);

// Canonical JSON with base64-embedded PNG patches and RLE masks.
// deserialize(serialize(doc)) is structurally equal to doc; unknown JSON
// fields are ignored so newer writers stay readable.
std::string serialize(const TemplateDoc& doc);
TemplateDoc deserialize(const std::string& text);

void save_template(const TemplateDoc& doc, const std::string& path);
TemplateDoc load_template(const std::string& path);

std::string base64_encode(const std::uint8_t* data, std::size_t n);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace tpl
}  // namespace timelinekit
