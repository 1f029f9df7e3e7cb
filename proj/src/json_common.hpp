#pragma once

// Internal JSON parsing/formatting helpers shared by the wire, template, and
// config readers. All readers report dotted field paths in SchemaError.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "timelinekit/errors.hpp"
#include "timelinekit/geometry.hpp"
#include "timelinekit/types.hpp"

namespace timelinekit {
namespace jsonio {

using json = nlohmann::ordered_json;

inline std::string line_of_offset(const std::string& text, size_t byte) {
    size_t line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return std::to_string(line);
}

inline json parse_or_throw(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", "JSON syntax error at line " + line_of_offset(text, e.byte) + ": " +
                                  e.what());
    }
}

inline const json& need(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + "." + key, "missing field");
    return *it;
}

inline std::string need_string(const json& obj, const std::string& key, const std::string& path) {
    const json& v = need(obj, key, path);
    if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline double need_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    return v.get<double>();
}

inline int need_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<int>();
}

inline BBox parse_bbox(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 4)
        throw SchemaError(path, "expected [top, left, width, height]");
    long long t = static_cast<long long>(need_number(v[0], path + "[0]"));
    long long l = static_cast<long long>(need_number(v[1], path + "[1]"));
    long long w = static_cast<long long>(need_number(v[2], path + "[2]"));
    long long h = static_cast<long long>(need_number(v[3], path + "[3]"));
    if (w < 1 || h < 1) throw SchemaError(path, "bbox width/height must be >= 1");
    return BBox{static_cast<int>(t), static_cast<int>(l), static_cast<int>(w),
                static_cast<int>(h)};
}

inline json bbox_json(const BBox& b) { return json::array({b.top, b.left, b.width, b.height}); }

inline PixelMask parse_mask(const json& v, const BBox& box, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of run lengths");
    std::vector<std::int64_t> runs;
    runs.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number_integer())
            throw SchemaError(path + "[" + std::to_string(i) + "]", "expected an integer");
        runs.push_back(v[i].get<std::int64_t>());
    }
    try {
        return rle_decode(box.width, box.height, runs);
    } catch (const MalformedRle& e) {
        throw MalformedRle(path + ": " + e.what());
    }
}

inline json mask_json(const PixelMask& m) {
    json arr = json::array();
    for (std::int64_t r : rle_encode(m)) arr.push_back(r);
    return arr;
}

inline ElementCategory parse_category_or_throw(const json& v, const std::string& path) {
    if (!v.is_string()) throw SchemaError(path, "expected a category name");
    auto c = parse_category(v.get<std::string>());
    if (!c) throw SchemaError(path, "unknown category '" + v.get<std::string>() + "'");
    return *c;
}

inline json rgb_json(const Rgb& c) { return json::array({c[0], c[1], c[2]}); }

inline Rgb parse_rgb(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw SchemaError(path, "expected [r, g, b]");
    Rgb c{};
    for (size_t i = 0; i < 3; ++i) {
        int x = need_int(v[i], path + "[" + std::to_string(i) + "]");
        if (x < 0 || x > 255) throw SchemaError(path, "channel outside [0, 255]");
        c[i] = static_cast<std::uint8_t>(x);
    }
    return c;
}

inline json global_json(const GlobalInfo& g) {
    json j;
    j["representation"] = to_string(g.representation);
    j["scale"] = to_string(g.scale);
    j["layout"] = to_string(g.layout);
    j["orientation"] = to_string(g.orientation);
    return j;
}

inline GlobalInfo parse_global(const json& g, const std::string& path) {
    auto rep = parse_representation(need_string(g, "representation", path));
    auto scl = parse_scale(need_string(g, "scale", path));
    auto lay = parse_layout(need_string(g, "layout", path));
    auto ori = parse_orientation(need_string(g, "orientation", path));
    if (!rep) throw SchemaError(path + ".representation", "unknown value");
    if (!scl) throw SchemaError(path + ".scale", "unknown value");
    if (!lay) throw SchemaError(path + ".layout", "unknown value");
    if (!ori) throw SchemaError(path + ".orientation", "unknown value");
    return GlobalInfo{*rep, *scl, *lay, *ori};
}

}  // namespace jsonio
}  // namespace timelinekit
