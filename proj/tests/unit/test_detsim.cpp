#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "timelinekit/detsim.hpp"
#include "timelinekit/errors.hpp"

using namespace timelinekit;
using testutil::make_timeline;

namespace {

detsim::NoiseProfile exact_scores(detsim::NoiseProfile p = {}) {
    p.score.sigma_tp = 0.0;
    p.score.sigma_fp = 0.0;
    return p;
}

}  // namespace

TEST_SUITE("detsim") {

TEST_CASE("all-zero profile returns ground truth verbatim") {
    auto f = make_timeline(7);
    auto dets = detsim::perturb(f.tl, exact_scores(), 11);
    REQUIRE(dets.size() == f.tl.elements.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        CHECK(dets[i].category == f.tl.elements[i].category);
        CHECK(dets[i].bbox == f.tl.elements[i].bbox);
        REQUIRE(dets[i].mask.has_value());
        CHECK(*dets[i].mask == f.tl.elements[i].mask);
        CHECK(dets[i].score == doctest::Approx(0.9).epsilon(1e-12));
        CHECK(dets[i].provenance == Provenance::Detected);
    }
}

TEST_CASE("perturb is deterministic per seed") {
    auto f = make_timeline(7);
    detsim::NoiseProfile noise;
    noise.duplicate_rate = 0.05;
    noise.drop_rate = 0.05;
    noise.misclassify_rate = 0.03;
    noise.jitter_px = 2.0;
    auto a = detsim::perturb(f.tl, noise, 99);
    auto b = detsim::perturb(f.tl, noise, 99);
    CHECK(a == b);
    auto c = detsim::perturb(f.tl, noise, 100);
    CHECK(a != c);
}

TEST_CASE("drop rate thins detections at the configured frequency") {
    auto f = make_timeline(7);
    detsim::NoiseProfile noise;
    noise.drop_rate = 0.3;
    std::size_t total = 0, kept = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        total += f.tl.elements.size();
        kept += detsim::perturb(f.tl, noise, seed).size();
    }
    double ratio = static_cast<double>(kept) / static_cast<double>(total);
    CHECK(ratio > 0.65);
    CHECK(ratio < 0.75);
}

TEST_CASE("duplicates overlap their source and score as false positives") {
    auto f = make_timeline(7);
    detsim::NoiseProfile noise = exact_scores();
    noise.duplicate_rate = 1.0;
    auto dets = detsim::perturb(f.tl, noise, 5);
    REQUIRE(dets.size() == 2 * f.tl.elements.size());
    for (std::size_t i = 0; i < dets.size(); i += 2) {
        const Detection& orig = dets[i];
        const Detection& dup = dets[i + 1];
        CHECK(orig.score == doctest::Approx(0.9).epsilon(1e-12));
        CHECK(dup.score == doctest::Approx(0.45).epsilon(1e-12));
        CHECK(dup.category == orig.category);
        CHECK(iou(dup.bbox, orig.bbox) >= 0.3);
        REQUIRE(dup.mask.has_value());
        CHECK(dup.mask->width == dup.bbox.width);
        CHECK(dup.mask->height == dup.bbox.height);
        CHECK(dup.mask->popcount() >= 1);
    }
}

TEST_CASE("hallucinations are maskless spurious boxes") {
    auto f = make_timeline(7);
    detsim::NoiseProfile noise = exact_scores();
    noise.hallucination_rate = 1.0;
    auto dets = detsim::perturb(f.tl, noise, 5);
    std::size_t n = f.tl.elements.size();
    REQUIRE(dets.size() == 2 * n);
    for (std::size_t i = n; i < dets.size(); ++i) {
        CHECK_FALSE(dets[i].mask.has_value());
        CHECK(dets[i].score == doctest::Approx(0.45).epsilon(1e-12));
        CHECK(dets[i].bbox.left >= 0);
        CHECK(dets[i].bbox.top >= 0);
        CHECK(dets[i].bbox.right() <= f.tl.image.width);
        CHECK(dets[i].bbox.bottom() <= f.tl.image.height);
    }
}

TEST_CASE("misclassification always changes the category") {
    auto f = make_timeline(7);
    detsim::NoiseProfile noise;
    noise.misclassify_rate = 1.0;
    auto dets = detsim::perturb(f.tl, noise, 3);
    REQUIRE(dets.size() == f.tl.elements.size());
    for (std::size_t i = 0; i < dets.size(); ++i)
        CHECK(dets[i].category != f.tl.elements[i].category);
}

TEST_CASE("jittered boxes keep usable masks") {
    auto f = make_timeline(7);
    detsim::NoiseProfile noise;
    noise.jitter_px = 3.0;
    int moved = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto dets = detsim::perturb(f.tl, noise, seed);
        REQUIRE(dets.size() == f.tl.elements.size());
        for (std::size_t i = 0; i < dets.size(); ++i) {
            if (!(dets[i].bbox == f.tl.elements[i].bbox)) ++moved;
            REQUIRE(dets[i].mask.has_value());
            CHECK(dets[i].mask->width == dets[i].bbox.width);
            CHECK(dets[i].mask->height == dets[i].bbox.height);
            CHECK(dets[i].mask->popcount() >= 1);
            // Moved boxes keep the ink at its absolute position: wherever the
            // jittered box still covers the original, the mask must agree.
            // (A box jittered clean off the ink gets a single sentinel pixel
            // instead; skip the agreement check there.)
            const Element& el = f.tl.elements[i];
            const Detection& d = dets[i];
            if (d.mask->popcount() == 1) continue;
            for (int y = 0; y < d.bbox.height; ++y) {
                int oy = d.bbox.top + y - el.bbox.top;
                if (oy < 0 || oy >= el.bbox.height) continue;
                for (int x = 0; x < d.bbox.width; ++x) {
                    int ox = d.bbox.left + x - el.bbox.left;
                    if (ox < 0 || ox >= el.bbox.width) continue;
                    CHECK(d.mask->at(x, y) == el.mask.at(ox, oy));
                }
            }
        }
    }
    CHECK(moved > 0);
}

TEST_CASE("mask coarsening keeps masks nonempty") {
    auto f = make_timeline(7);
    detsim::NoiseProfile noise;
    noise.mask_coarsen_px = 1.5;
    auto dets = detsim::perturb(f.tl, noise, 8);
    int changed = 0;
    REQUIRE(dets.size() == f.tl.elements.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        REQUIRE(dets[i].mask.has_value());
        CHECK(dets[i].mask->popcount() >= 1);
        CHECK(dets[i].mask->width == dets[i].bbox.width);
        if (!(*dets[i].mask == f.tl.elements[i].mask)) ++changed;
    }
    CHECK(changed > 0);
}

TEST_CASE("invalid profiles are rejected") {
    auto f = make_timeline(7);
    detsim::NoiseProfile bad;
    bad.drop_rate = -0.1;
    CHECK_THROWS_AS(detsim::perturb(f.tl, bad, 1), DegenerateInput);
    bad.drop_rate = 1.5;
    CHECK_THROWS_AS(detsim::perturb(f.tl, bad, 1), DegenerateInput);
    detsim::NoiseProfile neg;
    neg.jitter_px = -1.0;
    CHECK_THROWS_AS(detsim::perturb(f.tl, neg, 1), DegenerateInput);
}

}  // TEST_SUITE
