#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "timelinekit/detsim.hpp"
#include "timelinekit/reconstruct.hpp"
#include "timelinekit/segment.hpp"
#include "timelinekit/types.hpp"

namespace timelinekit {
namespace eval {

struct MatchOptions {
    double iou_thresh = 0.5;
    bool use_masks = false;          // match on mask IoU instead of bbox IoU
    bool include_recovered = false;  // let Recovered detections join as predictions
};

// One prediction's fate after greedy matching, in match order (score
// descending, input order on ties).
struct PredOutcome {
    ElementCategory category = ElementCategory::EventMark;
    double score = 0.0;
    bool tp = false;
    int gt_index = -1;  // matched ground-truth element, -1 for a false positive
};

struct MatchResult {
    std::vector<PredOutcome> preds;
    std::vector<int> gt_per_category;  // ground-truth count per category
    int num_gt = 0;
    int tp = 0;
    int fp = 0;
    int fn() const { return num_gt - tp; }
    double precision() const { return tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0; }
    double recall() const { return num_gt ? static_cast<double>(tp) / num_gt : 0.0; }
};

// Greedy matcher: predictions in score order claim the highest-IoU unmatched
// ground truth of their own category at IoU >= iou_thresh. Each ground truth
// matches at most once. In mask mode, predictions without a mask are skipped
// entirely (not counted as false positives).
MatchResult match_detections(const std::vector<Detection>& preds,
                             const std::vector<Element>& gts, const MatchOptions& opt);

// A corpus is a list of (predictions, ground truth) pairs, one per image.
struct LabeledImage {
    std::vector<Detection> preds;
    std::vector<Element> gts;
};

// 101-point interpolated average precision, macro-averaged over the
// categories that have ground truth. Throws NoGroundTruth when none do.
double corpus_ap(const std::vector<LabeledImage>& images, double iou_t, bool use_masks = false,
                 bool include_recovered = false);
double average_precision(const std::vector<Detection>& preds, const std::vector<Element>& gts,
                         double iou_t, bool use_masks = false);

// Mean AP over IoU thresholds 0.50, 0.55, ..., 0.95.
double ap_range(const std::vector<LabeledImage>& images, bool use_masks = false,
                bool include_recovered = false);

// ---- per-stage gain report ---------------------------------------------------

// Micro-averaged precision/recall (percent) at IoU 0.5 and 0.75, bbox + mask.
struct StageMetrics {
    std::string name;
    double bbox_p50 = 0, bbox_r50 = 0, bbox_p75 = 0, bbox_r75 = 0;
    double mask_p50 = 0, mask_r50 = 0, mask_p75 = 0, mask_r75 = 0;
};

struct GainReport {
    std::vector<StageMetrics> stages;  // Raw, +NMM, +RR, +DLGC
    std::vector<StageMetrics> deltas;  // stage[i] - stage[i-1]; zeros for Raw
};

struct GainConfig {
    int runs = 5;            // independent seeded repetitions, averaged
    std::uint64_t seed = 1;  // base seed; each run/image derives its own
    reconstruct::RepairParams repair;
    segment::GrabCutParams grabcut;
    bool refine_masks = true;  // run the segmentation-refinement stage
    int jobs = 1;
};

// Simulate a detector on the corpus, repair in stages, and report metric
// values and per-stage deltas. Stages: Raw detections, +NMM dedup, +RR
// (voting & recovery, with recovered predictions included), +DLGC (mask
// refinement of compact artwork). Values are means over `runs` repetitions.
GainReport gain_report(const std::vector<AnnotatedTimeline>& corpus,
                       const detsim::NoiseProfile& noise, const GainConfig& cfg);

std::string gain_csv(const GainReport& report);
std::string gain_table(const GainReport& report);

}  // namespace eval
}  // namespace timelinekit
