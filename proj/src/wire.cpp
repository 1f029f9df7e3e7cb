#include "timelinekit/wire.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json_common.hpp"
#include "timelinekit/errors.hpp"

namespace timelinekit {
namespace wire {

using jsonio::json;
using jsonio::bbox_json;
using jsonio::mask_json;
using jsonio::need;
using jsonio::need_number;
using jsonio::need_string;
using jsonio::parse_bbox;
using jsonio::parse_category_or_throw;
using jsonio::parse_mask;
using jsonio::parse_or_throw;

namespace {

json datum_json(const EventDatum& d) {
    json v;
    v["time"] = d.time;
    v["label"] = d.label;
    if (d.icon) v["icon"] = *d.icon;
    return v;
}

EventDatum parse_datum(const json& v, const std::string& path) {
    EventDatum d;
    d.time = need_number(need(v, "time", path), path + ".time");
    d.label = need_string(v, "label", path);
    if (auto ic = v.find("icon"); ic != v.end() && !ic->is_null()) {
        if (!ic->is_string()) throw SchemaError(path + ".icon", "expected a string");
        d.icon = ic->get<std::string>();
    }
    return d;
}

json detection_json(const Detection& d) {
    json j;
    j["category"] = to_string(d.category);
    j["score"] = d.score;
    j["bbox"] = bbox_json(d.bbox);
    if (d.mask) j["mask_rle"] = mask_json(*d.mask);
    if (d.provenance == Provenance::Recovered) j["provenance"] = to_string(d.provenance);
    return j;
}

Detection parse_detection(const json& v, const std::string& path) {
    Detection d;
    d.category = parse_category_or_throw(need(v, "category", path), path + ".category");
    d.score = need_number(need(v, "score", path), path + ".score");
    if (!(d.score >= 0.0 && d.score <= 1.0))
        throw SchemaError(path + ".score",
                          "score " + std::to_string(d.score) + " outside [0, 1]");
    d.bbox = parse_bbox(need(v, "bbox", path), path + ".bbox");
    if (auto it = v.find("mask_rle"); it != v.end() && !it->is_null())
        d.mask = parse_mask(*it, d.bbox, path + ".mask_rle");
    if (auto it = v.find("provenance"); it != v.end()) {
        if (!it->is_string() || (*it != "Detected" && *it != "Recovered"))
            throw SchemaError(path + ".provenance", "expected Detected or Recovered");
        d.provenance = *it == "Recovered" ? Provenance::Recovered : Provenance::Detected;
    }
    return d;
}

}  // namespace

namespace {

int need_dim(const json& j, const char* key) {
    const json& v = need(j, key, "$");
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw SchemaError(std::string("$.") + key, "expected a positive integer");
    return v.get<int>();
}

}  // namespace

std::string to_json(const DetectionFile& f) {
    json j;
    j["image"] = f.image;
    j["width"] = f.width;
    j["height"] = f.height;
    json dets = json::array();
    for (const Detection& d : f.detections) dets.push_back(detection_json(d));
    j["detections"] = std::move(dets);
    return j.dump(2) + "\n";
}

DetectionFile detections_from_json(const std::string& text) {
    json j = parse_or_throw(text);
    DetectionFile f;
    f.image = need_string(j, "image", "$");
    f.width = need_dim(j, "width");
    f.height = need_dim(j, "height");
    const json& dets = need(j, "detections", "$");
    if (!dets.is_array()) throw SchemaError("$.detections", "expected an array");
    for (size_t i = 0; i < dets.size(); ++i)
        f.detections.push_back(
            parse_detection(dets[i], "detections[" + std::to_string(i) + "]"));
    return f;
}

std::string to_json(const AnnotationFile& f) {
    json j;
    j["image"] = f.image;
    j["width"] = f.width;
    j["height"] = f.height;
    j["global"] = jsonio::global_json(f.global);
    json els = json::array();
    for (const Element& e : f.elements) {
        json v;
        v["category"] = to_string(e.category);
        v["bbox"] = bbox_json(e.bbox);
        v["mask_rle"] = mask_json(e.mask);
        els.push_back(std::move(v));
    }
    j["elements"] = std::move(els);
    json evs = json::array();
    for (const auto& group : f.events) evs.push_back(group);
    j["events"] = std::move(evs);
    if (!f.data.empty()) {
        json ds = json::array();
        for (const EventDatum& d : f.data) ds.push_back(datum_json(d));
        j["data"] = std::move(ds);
    }
    return j.dump(2) + "\n";
}

AnnotationFile annotation_from_json(const std::string& text) {
    json j = parse_or_throw(text);
    AnnotationFile f;
    f.image = need_string(j, "image", "$");
    f.width = need_dim(j, "width");
    f.height = need_dim(j, "height");
    f.global = jsonio::parse_global(need(j, "global", "$"), "global");
    const json& els = need(j, "elements", "$");
    if (!els.is_array()) throw SchemaError("$.elements", "expected an array");
    for (size_t i = 0; i < els.size(); ++i) {
        std::string path = "elements[" + std::to_string(i) + "]";
        const json& v = els[i];
        Element e;
        e.category = parse_category_or_throw(need(v, "category", path), path + ".category");
        e.bbox = parse_bbox(need(v, "bbox", path), path + ".bbox");
        e.mask = parse_mask(need(v, "mask_rle", path), e.bbox, path + ".mask_rle");
        f.elements.push_back(std::move(e));
    }
    const json& evs = need(j, "events", "$");
    if (!evs.is_array()) throw SchemaError("$.events", "expected an array");
    for (size_t i = 0; i < evs.size(); ++i) {
        std::string path = "events[" + std::to_string(i) + "]";
        if (!evs[i].is_array()) throw SchemaError(path, "expected an index array");
        std::vector<int> group;
        for (size_t m = 0; m < evs[i].size(); ++m) {
            const json& idx = evs[i][m];
            if (!idx.is_number_integer())
                throw SchemaError(path + "[" + std::to_string(m) + "]", "expected an integer");
            long long val = idx.get<long long>();
            if (val < 0 || val >= static_cast<long long>(f.elements.size()))
                throw SchemaError(path + "[" + std::to_string(m) + "]",
                                  "element index out of range");
            group.push_back(static_cast<int>(val));
        }
        f.events.push_back(std::move(group));
    }
    if (auto it = j.find("data"); it != j.end()) {
        if (!it->is_array()) throw SchemaError("$.data", "expected an array");
        for (size_t i = 0; i < it->size(); ++i)
            f.data.push_back(parse_datum((*it)[i], "data[" + std::to_string(i) + "]"));
    }
    return f;
}

std::string events_to_json(const std::vector<EventDatum>& data) {
    json j;
    json ds = json::array();
    for (const EventDatum& d : data) ds.push_back(datum_json(d));
    j["events"] = std::move(ds);
    return j.dump(2) + "\n";
}

std::vector<EventDatum> events_from_json(const std::string& text) {
    json j = parse_or_throw(text);
    const json& evs = need(j, "events", "$");
    if (!evs.is_array()) throw SchemaError("$.events", "expected an array");
    std::vector<EventDatum> out;
    for (size_t i = 0; i < evs.size(); ++i)
        out.push_back(parse_datum(evs[i], "events[" + std::to_string(i) + "]"));
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for read: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for write: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

void save_detections(const std::string& path, const DetectionFile& f) {
    write_text_file(path, to_json(f));
}

DetectionFile load_detections(const std::string& path) {
    return detections_from_json(read_text_file(path));
}

void save_annotation(const std::string& path, const AnnotationFile& f) {
    write_text_file(path, to_json(f));
}

AnnotationFile load_annotation(const std::string& path) {
    return annotation_from_json(read_text_file(path));
}

}  // namespace wire
}  // namespace timelinekit
