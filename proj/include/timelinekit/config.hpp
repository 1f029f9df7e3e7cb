#pragma once

#include <optional>
#include <string>

#include "timelinekit/detsim.hpp"
#include "timelinekit/eval.hpp"
#include "timelinekit/reconstruct.hpp"
#include "timelinekit/segment.hpp"

namespace timelinekit {
namespace config {

// Everything the CLI can tune from one JSON file. Each section and each field
// is optional; missing values keep the library defaults shown here.
struct PipelineConfig {
    detsim::NoiseProfile noise;
    reconstruct::RepairParams repair;
    segment::GrabCutParams grabcut;

    // synth-gen
    int synth_count = 20;
    std::optional<int> canvas_width;   // pin the sampled canvas, else per-image
    std::optional<int> canvas_height;
    std::optional<int> n_events;

    // evaluate / pipeline
    int runs = 5;
    bool refine_masks = true;
};

// Parse a config JSON document. Unknown keys are rejected (SchemaError with
// the offending dotted path) so typos never silently fall back to defaults.
PipelineConfig parse_config(const std::string& text);

PipelineConfig load_config(const std::string& path);

// The full config as JSON with every field present (defaults included) —
// handy as a starting template and used by round-trip tests.
std::string config_json(const PipelineConfig& cfg);

}  // namespace config
}  // namespace timelinekit
