#pragma once

#include <string>
#include <vector>

#include "timelinekit/types.hpp"

namespace timelinekit {
namespace wire {

// The detector-facing interchange format: any real detector that can emit
// this JSON plugs into the downstream pipeline.
struct DetectionFile {
    std::string image;  // path of the bitmap the detections refer to
    int width = 0;      // bitmap dimensions (NMM ranking normalizes by them)
    int height = 0;
    std::vector<Detection> detections;
};

// Ground-truth sidecar written next to each synthesized bitmap.
struct AnnotationFile {
    std::string image;
    int width = 0;
    int height = 0;
    GlobalInfo global;
    std::vector<Element> elements;
    std::vector<std::vector<int>> events;  // indices into elements
    std::vector<EventDatum> data;          // the payload behind each event
};

// Serialization is canonical: fixed key order, no whitespace variance, masks
// as run-length counts. load(save(x)) == x including provenance.
std::string to_json(const DetectionFile& f);
std::string to_json(const AnnotationFile& f);

// Parsers validate everything and throw SchemaError naming the offending
// field ("detections[3].score: ..."); corrupt run-length data throws
// MalformedRle. JSON syntax errors become SchemaError with a line number.
DetectionFile detections_from_json(const std::string& text);
AnnotationFile annotation_from_json(const std::string& text);

// Bare event payloads ({"events": [{time, label, icon?}, ...]}) for driving
// the renderer without a full annotation file.
std::string events_to_json(const std::vector<EventDatum>& data);
std::vector<EventDatum> events_from_json(const std::string& text);

void save_detections(const std::string& path, const DetectionFile& f);
DetectionFile load_detections(const std::string& path);
void save_annotation(const std::string& path, const AnnotationFile& f);
AnnotationFile load_annotation(const std::string& path);

// Shared file helpers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace wire
}  // namespace timelinekit
