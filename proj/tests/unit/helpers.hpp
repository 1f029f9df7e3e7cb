#pragma once

// Shared fixture helpers for the unit suites.

#include <cstdint>
#include <utility>
#include <vector>

#include "timelinekit/errors.hpp"
#include "timelinekit/rng.hpp"
#include "timelinekit/synth.hpp"
#include "timelinekit/types.hpp"

namespace testutil {

struct SynthFixture {
    timelinekit::AnnotatedTimeline tl;
    std::vector<timelinekit::EventDatum> data;
    timelinekit::synth::TimelineSpec spec;
};

// Sample a timeline, retrying fresh seeds past layouts that overflow.
inline SynthFixture make_timeline(std::uint64_t seed,
                                  const timelinekit::synth::SpecConstraints& c = {}) {
    using namespace timelinekit;
    for (int attempt = 0;; ++attempt) {
        try {
            std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(attempt));
            SynthFixture f;
            f.spec = synth::sample_spec(s, c);
            f.data = synth::sample_events(f.spec, derive_seed(s, 1));
            f.tl = synth::generate(f.spec, f.data, derive_seed(s, 2));
            return f;
        } catch (const LayoutOverflow&) {
            if (attempt >= 30) throw;
        }
    }
}

// Ground truth as perfect detections.
inline std::vector<timelinekit::Detection> as_detections(
    const timelinekit::AnnotatedTimeline& tl, double score = 0.9) {
    std::vector<timelinekit::Detection> out;
    out.reserve(tl.elements.size());
    for (const auto& e : tl.elements) {
        timelinekit::Detection d;
        d.category = e.category;
        d.score = score;
        d.bbox = e.bbox;
        d.mask = e.mask;
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace testutil
