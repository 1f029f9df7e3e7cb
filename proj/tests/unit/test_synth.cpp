#include <doctest.h>

#include <set>
#include <vector>

#include "helpers.hpp"
#include "timelinekit/errors.hpp"
#include "timelinekit/synth.hpp"
#include "timelinekit/wire.hpp"

using namespace timelinekit;
using testutil::make_timeline;

namespace {

wire::AnnotationFile as_annotation(const testutil::SynthFixture& f) {
    wire::AnnotationFile a;
    a.image = "x.png";
    a.width = f.tl.image.width;
    a.height = f.tl.image.height;
    a.global = f.tl.global;
    a.elements = f.tl.elements;
    a.events = f.tl.events;
    a.data = f.data;
    return a;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("viable design space") {
    auto combos = viable_combinations();
    CHECK(combos.size() == 21);  // Linear x 5 scales x 4 layouts + the freeform case
    for (const auto& [r, s, l] : combos) CHECK(is_viable(r, s, l));
    CHECK(is_viable(Representation::Arbitrary, Scale::Sequential, Layout::Unified));
    CHECK_FALSE(is_viable(Representation::Arbitrary, Scale::Chronological, Layout::Unified));
    CHECK_FALSE(is_viable(Representation::Arbitrary, Scale::Sequential, Layout::Faceted));
}

TEST_CASE("sampled specs are always viable") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        synth::TimelineSpec spec = synth::sample_spec(seed);
        CHECK(is_viable(spec.global.representation, spec.global.scale, spec.global.layout));
        CHECK(spec.n_events >= 3);
        CHECK(spec.n_events <= 8);
        CHECK(spec.canvas_width >= 160);
        CHECK(spec.canvas_height >= 120);
    }
}

TEST_CASE("constraints pin the sampled design") {
    synth::SpecConstraints c;
    c.scale = Scale::Logarithmic;
    c.layout = Layout::Faceted;
    c.n_events = 5;
    c.canvas = {{700, 450}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        synth::TimelineSpec spec = synth::sample_spec(seed, c);
        CHECK(spec.global.scale == Scale::Logarithmic);
        CHECK(spec.global.layout == Layout::Faceted);
        CHECK(spec.global.representation == Representation::Linear);
        CHECK(spec.n_events == 5);
        CHECK(spec.canvas_width == 700);
        CHECK(spec.canvas_height == 450);
    }
}

TEST_CASE("contradictory constraints throw") {
    synth::SpecConstraints c;
    c.representation = Representation::Arbitrary;
    c.scale = Scale::Chronological;
    CHECK_THROWS_AS(synth::sample_spec(1, c), InfeasibleConstraint);

    synth::SpecConstraints o;
    o.representation = Representation::Arbitrary;
    o.orientation = Orientation::Horizontal;
    CHECK_THROWS_AS(synth::sample_spec(1, o), InfeasibleConstraint);

    synth::SpecConstraints d;
    d.orientation = Orientation::Other;
    d.layout = Layout::Faceted;
    CHECK_THROWS_AS(synth::sample_spec(1, d), InfeasibleConstraint);

    synth::SpecConstraints n;
    n.n_events = 0;
    CHECK_THROWS_AS(synth::sample_spec(1, n), InfeasibleConstraint);

    synth::SpecConstraints few;
    few.layout = Layout::FacetedSegmented;
    few.n_events = 3;
    CHECK_THROWS_AS(synth::sample_spec(1, few), InfeasibleConstraint);

    synth::SpecConstraints tiny;
    tiny.canvas = {{100, 80}};
    CHECK_THROWS_AS(synth::sample_spec(1, tiny), InfeasibleConstraint);
}

TEST_CASE("generation is deterministic") {
    auto a = make_timeline(404);
    auto b = make_timeline(404);
    CHECK(a.tl.image.rgb == b.tl.image.rgb);
    CHECK(wire::to_json(as_annotation(a)) == wire::to_json(as_annotation(b)));
}

TEST_CASE("annotation invariants hold across seeds") {
    for (std::uint64_t seed : {1ull, 7ull, 23ull, 99ull}) {
        auto f = make_timeline(seed);
        const auto& tl = f.tl;
        int W = tl.image.width, H = tl.image.height;
        int n_marks = 0, n_bodies = 0;
        std::set<int> grouped;
        for (const auto& e : tl.elements) {
            CHECK(e.bbox.left >= 0);
            CHECK(e.bbox.top >= 0);
            CHECK(e.bbox.right() <= W);
            CHECK(e.bbox.bottom() <= H);
            CHECK(e.mask.width == e.bbox.width);
            CHECK(e.mask.height == e.bbox.height);
            CHECK(e.mask.popcount() >= 1);
            if (e.category == ElementCategory::EventMark) ++n_marks;
            if (e.category == ElementCategory::MainBody) ++n_bodies;
        }
        CHECK(n_marks == f.spec.n_events);
        CHECK(n_bodies >= 1);
        CHECK(static_cast<int>(tl.events.size()) == f.spec.n_events);
        for (const auto& ev : tl.events) {
            CHECK(!ev.empty());
            for (int idx : ev) {
                CHECK(idx >= 0);
                CHECK(idx < static_cast<int>(tl.elements.size()));
                CHECK(!grouped.count(idx));
                grouped.insert(idx);
                CHECK(tl.elements[idx].category != ElementCategory::MainBody);
            }
        }
        // Same-category masks never overlap in absolute coordinates.
        for (int c = 0; c < kNumCategories; ++c) {
            PixelMask occupancy(W, H);
            for (const auto& e : tl.elements) {
                if (static_cast<int>(e.category) != c) continue;
                for (int y = 0; y < e.mask.height; ++y)
                    for (int x = 0; x < e.mask.width; ++x) {
                        if (!e.mask.at(x, y)) continue;
                        CHECK(occupancy.at(e.bbox.left + x, e.bbox.top + y) == 0);
                        occupancy.set(e.bbox.left + x, e.bbox.top + y, 1);
                    }
            }
        }
    }
}

TEST_CASE("event data matches the spec") {
    auto f = make_timeline(55);
    CHECK(static_cast<int>(f.data.size()) == f.spec.n_events);
    for (std::size_t i = 1; i < f.data.size(); ++i) CHECK(f.data[i - 1].time <= f.data[i].time);
}

TEST_CASE("format_time") {
    CHECK(synth::format_time(2000) == "2000");
    CHECK(synth::format_time(-3) == "-3");
    CHECK(synth::format_time(2000.5) == "2000.5");
    CHECK(synth::format_time(0) == "0");
}

}  // TEST_SUITE
