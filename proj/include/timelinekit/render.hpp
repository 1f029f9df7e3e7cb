#pragma once

#include <optional>
#include <string>
#include <vector>

#include "timelinekit/image.hpp"
#include "timelinekit/template_doc.hpp"
#include "timelinekit/types.hpp"

namespace timelinekit {
namespace render {

struct RenderOptions {
    std::optional<int> canvas_width;   // default: the template's canvas
    std::optional<int> canvas_height;
    std::optional<Scale> scale_override;
    std::optional<tpl::TemplateDoc> representation_source;
    bool allow_looping = true;  // event i reuses slot (i mod slots)
};

struct RenderJob {
    tpl::TemplateDoc doc;
    std::vector<EventDatum> data;
    RenderOptions options;
};

struct PlacedElement {
    ElementCategory category = ElementCategory::EventMark;
    BBox bbox;
    bool operator==(const PlacedElement&) const = default;
};

struct RenderResult {
    std::string svg;
    Image bitmap;  // rasterized from the same scene the SVG describes
    std::vector<PlacedElement> elements;
    std::vector<std::vector<int>> events;  // per event, indices into elements
};

// Deterministic rendering of template + data.
//
// Anchor positions: with a representation source, the source's slot anchors
// (scaled to the canvas) in slot order; otherwise, when the data count equals
// the slot count and nothing overrides scale or canvas, the template anchors
// verbatim; otherwise positions computed along the arc-length-parameterized
// polyline through the template anchors using the (possibly overridden)
// scale. Event i takes its artwork and member offsets from slot (i mod s).
// Oversized text shrinks to 60% of the template font, then ellipsizes.
//
// Throws TemplateIncomplete (no event slots), InsufficientSlots (looping
// disabled and fewer slots than events), DegenerateInput (no data/unsorted
// times), DomainError (scale cannot place a value).
RenderResult render(const RenderJob& job);

// Borrow the source's event-anchor geometry (and its main-body artwork); the
// target keeps its own marks, fonts, and member offsets. Throws
// InsufficientSlots eagerly when looping is disabled and the source has
// fewer slots than the job has events.
RenderJob transfer_representation(RenderJob target, const tpl::TemplateDoc& source);

}  // namespace render
}  // namespace timelinekit
