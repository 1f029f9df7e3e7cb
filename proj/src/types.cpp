#include "timelinekit/types.hpp"

#include <cmath>

namespace timelinekit {

bool is_reusable(ElementCategory c) {
    switch (c) {
        case ElementCategory::EventMark:
        case ElementCategory::AnnotationMark:
        case ElementCategory::MainBody:
            return true;
        default:
            return false;
    }
}

bool is_updatable(ElementCategory c) { return !is_reusable(c); }

const char* to_string(ElementCategory c) {
    switch (c) {
        case ElementCategory::EventMark: return "EventMark";
        case ElementCategory::EventText: return "EventText";
        case ElementCategory::AnnotationMark: return "AnnotationMark";
        case ElementCategory::AnnotationText: return "AnnotationText";
        case ElementCategory::AnnotationIcon: return "AnnotationIcon";
        case ElementCategory::MainBody: return "MainBody";
    }
    return "?";
}

std::vector<ElementCategory> all_categories() {
    return {ElementCategory::EventMark,      ElementCategory::EventText,
            ElementCategory::AnnotationMark, ElementCategory::AnnotationText,
            ElementCategory::AnnotationIcon, ElementCategory::MainBody};
}

std::optional<ElementCategory> parse_category(const std::string& s) {
    for (ElementCategory c : all_categories())
        if (s == to_string(c)) return c;
    return std::nullopt;
}

const char* to_string(Provenance p) {
    return p == Provenance::Detected ? "Detected" : "Recovered";
}

const char* to_string(Representation v) {
    return v == Representation::Linear ? "Linear" : "Arbitrary";
}

const char* to_string(Scale v) {
    switch (v) {
        case Scale::Chronological: return "Chronological";
        case Scale::Relative: return "Relative";
        case Scale::Logarithmic: return "Logarithmic";
        case Scale::Sequential: return "Sequential";
        case Scale::SequentialInterim: return "SequentialInterim";
    }
    return "?";
}

const char* to_string(Layout v) {
    switch (v) {
        case Layout::Unified: return "Unified";
        case Layout::Faceted: return "Faceted";
        case Layout::Segmented: return "Segmented";
        case Layout::FacetedSegmented: return "FacetedSegmented";
    }
    return "?";
}

const char* to_string(Orientation v) {
    switch (v) {
        case Orientation::Horizontal: return "Horizontal";
        case Orientation::Vertical: return "Vertical";
        case Orientation::Other: return "Other";
    }
    return "?";
}

std::optional<Representation> parse_representation(const std::string& s) {
    for (Representation v : {Representation::Linear, Representation::Arbitrary})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

std::optional<Scale> parse_scale(const std::string& s) {
    for (Scale v : {Scale::Chronological, Scale::Relative, Scale::Logarithmic, Scale::Sequential,
                    Scale::SequentialInterim})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

std::optional<Layout> parse_layout(const std::string& s) {
    for (Layout v :
         {Layout::Unified, Layout::Faceted, Layout::Segmented, Layout::FacetedSegmented})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

std::optional<Orientation> parse_orientation(const std::string& s) {
    for (Orientation v : {Orientation::Horizontal, Orientation::Vertical, Orientation::Other})
        if (s == to_string(v)) return v;
    return std::nullopt;
}

bool is_viable(Representation r, Scale s, Layout l) {
    if (r == Representation::Linear) return true;
    return s == Scale::Sequential && l == Layout::Unified;
}

Orientation classify_orientation(const std::vector<std::pair<double, double>>& centers) {
    const size_t n = centers.size();
    if (n < 2) return Orientation::Other;
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
    cxx /= static_cast<double>(n);
    cyy /= static_cast<double>(n);
    cxy /= static_cast<double>(n);
    double tr = cxx + cyy;
    double disc = std::sqrt(std::max(0.0, (cxx - cyy) * (cxx - cyy) + 4.0 * cxy * cxy));
    double l1 = (tr + disc) / 2.0, l2 = (tr - disc) / 2.0;
    if (l1 < 1e-9) return Orientation::Other;          // no spread at all
    if (l2 / l1 > 0.85) return Orientation::Other;     // no dominant axis
    double theta = 0.5 * std::atan2(2.0 * cxy, cxx - cyy) * 180.0 / 3.14159265358979323846;
    double a = std::abs(theta);  // angle to the x axis in [0, 90]
    if (a > 90.0) a = 180.0 - a;
    if (a <= 30.0) return Orientation::Horizontal;
    if (a >= 60.0) return Orientation::Vertical;
    return Orientation::Other;
}

std::vector<std::tuple<Representation, Scale, Layout>> viable_combinations() {
    std::vector<std::tuple<Representation, Scale, Layout>> out;
    for (Representation r : {Representation::Linear, Representation::Arbitrary})
        for (Scale s : {Scale::Chronological, Scale::Relative, Scale::Logarithmic,
                        Scale::Sequential, Scale::SequentialInterim})
            for (Layout l :
                 {Layout::Unified, Layout::Faceted, Layout::Segmented, Layout::FacetedSegmented})
                if (is_viable(r, s, l)) out.emplace_back(r, s, l);
    return out;
}

}  // namespace timelinekit
