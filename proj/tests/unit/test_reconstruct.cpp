#include <doctest.h>

#include <algorithm>
#include <vector>

#include "helpers.hpp"
#include "timelinekit/detsim.hpp"
#include "timelinekit/errors.hpp"
#include "timelinekit/reconstruct.hpp"

using namespace timelinekit;
using namespace timelinekit::reconstruct;
using testutil::as_detections;
using testutil::make_timeline;

namespace {

Detection det(BBox b, double score, ElementCategory cat = ElementCategory::EventMark) {
    Detection d;
    d.category = cat;
    d.score = score;
    d.bbox = b;
    return d;
}

}  // namespace

TEST_SUITE("reconstruct") {

TEST_CASE("nms keeps distinct boxes and drops crowded ones") {
    // IoU of the pair is 100/300 = 1/3: below the default 0.5, above 0.3.
    std::vector<Detection> dets = {det({0, 0, 20, 10}, 1.00), det({0, 10, 20, 10}, 0.58)};
    auto kept = nms(dets, 0.0, 0.5);
    CHECK(kept.size() == 2);
    CHECK(kept[0].score == doctest::Approx(1.00));

    auto tight = nms(dets, 0.0, 0.3);
    REQUIRE(tight.size() == 1);
    CHECK(tight[0].bbox == BBox{0, 0, 20, 10});

    auto filtered = nms(dets, 0.6, 0.5);
    REQUIRE(filtered.size() == 1);
    CHECK(filtered[0].score == doctest::Approx(1.00));
}

TEST_CASE("nms only suppresses within a category") {
    std::vector<Detection> dets = {det({0, 0, 20, 10}, 1.0, ElementCategory::EventMark),
                                   det({0, 0, 20, 10}, 0.9, ElementCategory::AnnotationMark)};
    CHECK(nms(dets, 0.0, 0.5).size() == 2);
}

TEST_CASE("nms tie-break is deterministic: score desc then area desc") {
    std::vector<Detection> dets = {det({0, 0, 10, 10}, 0.8), det({0, 0, 30, 30}, 0.8)};
    auto kept = nms(dets, 0.0, 0.05);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].bbox == BBox{0, 0, 30, 30});
}

TEST_CASE("nmm merges a contained duplicate that nms keeps") {
    // Contained box: IoU = 16/100 < 0.5 so NMS keeps both, but intersection
    // over the smaller box is 1.0 so NMM always merges.
    std::vector<Detection> pair_ = {det({0, 0, 10, 10}, 1.0), det({2, 2, 4, 4}, 1.0)};
    CHECK(nms(pair_, 0.0, 0.5).size() == 2);
    auto merged = nmm(pair_, 0.5, 100, 100);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].bbox == BBox{0, 0, 10, 10});
    CHECK(merged[0].score == doctest::Approx(1.0));
}

TEST_CASE("nmm merges overlapping fragments into the union box") {
    std::vector<Detection> dets = {det({0, 0, 20, 10}, 1.00), det({0, 10, 20, 10}, 0.58)};
    // intersection = 100, min area = 200 -> 0.5 >= thresh, one union box
    auto merged = nmm(dets, 0.5, 100, 100);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].bbox == BBox{0, 0, 30, 10});
    CHECK(merged[0].score == doctest::Approx(1.00));
}

TEST_CASE("nmm unions masks when merging") {
    Detection a = det({0, 0, 4, 2}, 0.9);
    a.mask = PixelMask(4, 2, 1);
    Detection b = det({0, 2, 4, 2}, 0.8);
    b.mask = PixelMask(4, 2, 1);
    auto merged = nmm({a, b}, 0.5, 50, 50);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].bbox == BBox{0, 0, 6, 2});
    REQUIRE(merged[0].mask.has_value());
    CHECK(merged[0].mask->width == 6);
    CHECK(merged[0].mask->height == 2);
    CHECK(merged[0].mask->popcount() == 12);
}

TEST_CASE("nmm leaves disjoint boxes alone") {
    std::vector<Detection> dets = {det({0, 0, 5, 5}, 0.9), det({20, 20, 5, 5}, 0.8)};
    CHECK(nmm(dets, 0.5, 100, 100).size() == 2);
}

TEST_CASE("select_dedup prefers the more shape-consistent variant") {
    // Four identical marks: consistent. The alternative has one outlier box.
    std::vector<Detection> tidy = {det({0, 0, 10, 10}, 0.9), det({0, 20, 10, 10}, 0.9),
                                   det({0, 40, 10, 10}, 0.9), det({0, 60, 10, 10}, 0.9)};
    std::vector<Detection> messy = tidy;
    messy[3] = det({0, 60, 38, 4}, 0.9);
    CHECK(shape_consistency_cost(tidy) < shape_consistency_cost(messy));
    CHECK(select_dedup(messy, tidy) == tidy);
    CHECK(select_dedup(tidy, messy) == tidy);
    // Equal costs (same shapes, different positions) go to the merge variant.
    std::vector<Detection> shifted = tidy;
    for (auto& d : shifted) d.bbox.left += 5;
    CHECK(select_dedup(shifted, tidy) == tidy);
    CHECK(select_dedup(tidy, shifted) == shifted);
}

TEST_CASE("infer_orientation follows the event marks") {
    std::vector<Detection> horiz;
    for (int i = 0; i < 5; ++i) horiz.push_back(det({100, 40 * i, 10, 10}, 0.9));
    CHECK(infer_orientation(horiz) == Orientation::Horizontal);

    std::vector<Detection> vert;
    for (int i = 0; i < 5; ++i) vert.push_back(det({40 * i, 100, 10, 10}, 0.9));
    CHECK(infer_orientation(vert) == Orientation::Vertical);

    // No marks at all: falls back to the non-body detections.
    std::vector<Detection> texts;
    for (int i = 0; i < 5; ++i)
        texts.push_back(det({100, 40 * i, 12, 8}, 0.9, ElementCategory::EventText));
    CHECK(infer_orientation(texts) == Orientation::Horizontal);
}

TEST_CASE("cluster_events attaches members to the nearest anchor") {
    std::vector<Detection> dets = {
        det({100, 10, 10, 10}, 0.9, ElementCategory::EventMark),    // 0 anchor A
        det({100, 200, 10, 10}, 0.9, ElementCategory::EventMark),   // 1 anchor B
        det({80, 12, 14, 8}, 0.9, ElementCategory::EventText),      // 2 near A
        det({80, 198, 14, 8}, 0.9, ElementCategory::EventText),     // 3 near B
        det({60, 205, 12, 12}, 0.9, ElementCategory::AnnotationMark),  // 4 near B
        det({10, 0, 300, 30}, 0.9, ElementCategory::MainBody),      // 5 never clustered
    };
    auto clusters = cluster_events(dets, Orientation::Horizontal);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].anchor == 0);
    CHECK(clusters[1].anchor == 1);
    CHECK(clusters[0].axis_pos < clusters[1].axis_pos);
    CHECK(clusters[0].members == std::vector<int>{2});
    REQUIRE(clusters[1].members.size() == 2);
    CHECK(std::find(clusters[1].members.begin(), clusters[1].members.end(), 3) !=
          clusters[1].members.end());
    CHECK(std::find(clusters[1].members.begin(), clusters[1].members.end(), 4) !=
          clusters[1].members.end());
    for (const auto& c : clusters)
        CHECK(std::find(c.members.begin(), c.members.end(), 5) == c.members.end());
}

TEST_CASE("cluster_events without anchors splits on axis gaps") {
    // Extents are 10 wide, so the split threshold is a 15px center gap:
    // 15 -> 27 stays together, 27 -> 205 starts a new cluster.
    std::vector<Detection> dets = {
        det({50, 10, 10, 10}, 0.9, ElementCategory::EventText),
        det({50, 22, 10, 10}, 0.9, ElementCategory::EventText),
        det({50, 200, 10, 10}, 0.9, ElementCategory::EventText),
    };
    auto clusters = cluster_events(dets, Orientation::Horizontal);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].anchor == -1);
    CHECK(clusters[0].members.size() == 2);
    CHECK(clusters[1].members.size() == 1);
    CHECK(clusters[0].axis_pos < clusters[1].axis_pos);
}

TEST_CASE("cluster_events rejects empty input") {
    std::vector<Detection> only_body = {det({0, 0, 10, 10}, 0.9, ElementCategory::MainBody)};
    CHECK_THROWS_AS(cluster_events({}, Orientation::Horizontal), NoElements);
    CHECK_THROWS_AS(cluster_events(only_body, Orientation::Horizontal), NoElements);
}

TEST_CASE("fix_misclassified relabels a shape-matched minority member") {
    // Three clusters with an annotation mark each; the fourth cluster's
    // same-shaped box came back as an icon (minority category).
    std::vector<Detection> dets;
    for (int i = 0; i < 4; ++i) {
        dets.push_back(det({100, 60 * i, 10, 10}, 0.9, ElementCategory::EventMark));
        ElementCategory cat =
            i == 3 ? ElementCategory::AnnotationIcon : ElementCategory::AnnotationMark;
        dets.push_back(det({80, 60 * i, 12, 12}, 0.9, cat));
    }
    auto clusters = cluster_events(dets, Orientation::Horizontal);
    REQUIRE(clusters.size() == 4);
    auto fixed = fix_misclassified(dets, clusters);
    REQUIRE(fixed.size() == dets.size());
    CHECK(fixed[7].category == ElementCategory::AnnotationMark);
    for (std::size_t i = 0; i + 1 < dets.size(); ++i) CHECK(fixed[i].category == dets[i].category);
    for (std::size_t i = 0; i < dets.size(); ++i) CHECK(fixed[i].bbox == dets[i].bbox);
}

TEST_CASE("fix_misclassified respects the shape gates") {
    // Same setup but the odd box is far from the majority shape: stays put.
    std::vector<Detection> dets;
    for (int i = 0; i < 4; ++i) {
        dets.push_back(det({100, 60 * i, 10, 10}, 0.9, ElementCategory::EventMark));
        if (i == 3)
            dets.push_back(det({80, 60 * i, 40, 4}, 0.9, ElementCategory::AnnotationIcon));
        else
            dets.push_back(det({80, 60 * i, 12, 12}, 0.9, ElementCategory::AnnotationMark));
    }
    auto clusters = cluster_events(dets, Orientation::Horizontal);
    auto fixed = fix_misclassified(dets, clusters);
    CHECK(fixed[7].category == ElementCategory::AnnotationIcon);
}

TEST_CASE("fix_misclassified never relabels event marks") {
    std::vector<Detection> dets;
    for (int i = 0; i < 4; ++i) {
        dets.push_back(det({100, 60 * i, 10, 10}, 0.9, ElementCategory::EventMark));
        if (i != 3)
            dets.push_back(det({80, 60 * i, 10, 10}, 0.9, ElementCategory::AnnotationMark));
    }
    auto clusters = cluster_events(dets, Orientation::Horizontal);
    auto fixed = fix_misclassified(dets, clusters);
    for (std::size_t i = 0; i < fixed.size(); ++i)
        if (dets[i].category == ElementCategory::EventMark)
            CHECK(fixed[i].category == ElementCategory::EventMark);
}

TEST_CASE("recover_missing synthesizes the majority category at the median offset") {
    // Every cluster has its text 20px above the anchor except the last.
    std::vector<Detection> dets;
    for (int i = 0; i < 4; ++i) {
        dets.push_back(det({100, 60 * i, 10, 10}, 0.9, ElementCategory::EventMark));
        if (i != 3)
            dets.push_back(det({80, 60 * i, 12, 8}, 0.9, ElementCategory::EventText));
    }
    auto clusters = cluster_events(dets, Orientation::Horizontal);
    RepairParams params;
    params.recovered_score = 0.25;
    auto out = recover_missing(dets, clusters, params);
    REQUIRE(out.size() == dets.size() + 1);
    const Detection& rec = out.back();
    CHECK(rec.category == ElementCategory::EventText);
    CHECK(rec.provenance == Provenance::Recovered);
    CHECK(rec.score == doctest::Approx(0.25));
    CHECK_FALSE(rec.mask.has_value());
    CHECK(rec.bbox.top == 80);
    CHECK(rec.bbox.left == 180);
    CHECK(rec.bbox.width == 12);
    CHECK(rec.bbox.height == 8);
}

TEST_CASE("repair on perfect detections is a no-op") {
    for (std::uint64_t seed : {3ull, 12ull}) {
        auto f = make_timeline(seed);
        auto dets = as_detections(f.tl);
        RepairTrace trace;
        auto out = repair(dets, f.tl.image.width, f.tl.image.height, {}, &trace);
        REQUIRE(out.size() == dets.size());
        // Same boxes and categories (order may change across stages).
        auto key = [](const Detection& d) {
            return std::tuple(static_cast<int>(d.category), d.bbox.top, d.bbox.left,
                              d.bbox.width, d.bbox.height);
        };
        std::vector<std::tuple<int, int, int, int, int>> a, b;
        for (const auto& d : dets) a.push_back(key(d));
        for (const auto& d : out) b.push_back(key(d));
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
        CHECK(trace.raw.size() == dets.size());
        CHECK(trace.after_recover.size() == out.size());
    }
}

TEST_CASE("repair dedups, revotes and recovers on noisy detections") {
    auto f = make_timeline(3);
    detsim::NoiseProfile noise;
    noise.duplicate_rate = 0.2;
    noise.drop_rate = 0.1;
    noise.misclassify_rate = 0.05;
    noise.jitter_px = 2.0;
    auto noisy = detsim::perturb(f.tl, noise, 17);
    RepairTrace trace;
    auto out = repair(noisy, f.tl.image.width, f.tl.image.height, {}, &trace);
    CHECK(trace.raw.size() == noisy.size());
    CHECK(trace.after_dedup.size() <= noisy.size());
    CHECK(out.size() == trace.after_recover.size());
    // Recovered entries, if any, carry the configured provenance.
    for (const auto& d : out)
        if (d.provenance == Provenance::Recovered) CHECK_FALSE(d.mask.has_value());
}

}  // TEST_SUITE
