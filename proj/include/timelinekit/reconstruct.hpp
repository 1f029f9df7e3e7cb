#pragma once

#include <optional>
#include <vector>

#include "timelinekit/types.hpp"

namespace timelinekit {
namespace reconstruct {

struct RepairParams {
    double nms_score_thresh = 0.0;  // drop detections below this before NMS
    double nms_iou_thresh = 0.5;
    double nmm_merge_thresh = 0.5;  // on intersection-over-min-area
    double vote_aspect_tol = 0.20;  // shape gates for misclassification voting
    double vote_area_tol = 0.30;
    double gap_factor = 1.5;        // anchor-free clustering: gap > factor * median extent
    double recovered_score = 0.0;
};

// Greedy non-maximum suppression per category: keep the best-scoring box,
// drop same-category boxes with IoU >= iou_thresh against a kept box.
// Deterministic order: score desc, then area desc, then top, then left.
std::vector<Detection> nms(const std::vector<Detection>& dets, double score_thresh,
                           double iou_thresh);

// Non-maximum merging: boxes are ranked by confidence plus bbox-to-image area
// ratio; overlapping same-category boxes (intersection over the smaller box
// >= merge_thresh) merge into their union bbox with the max score and the
// union of their masks, repeatedly until stable. A contained duplicate always
// merges; NMS at the same threshold may keep it.
std::vector<Detection> nmm(const std::vector<Detection>& dets, double merge_thresh, int image_w,
                           int image_h);

// Choose between the NMS and NMM outputs by per-category shape consistency
// (mean coefficient of variation of bbox aspect and area, over categories
// with >= 2 boxes). Lower is more consistent; ties prefer the merge variant.
std::vector<Detection> select_dedup(const std::vector<Detection>& nms_out,
                                    const std::vector<Detection>& nmm_out);

double shape_consistency_cost(const std::vector<Detection>& dets);

// Dominant direction of the event marks (falls back to all non-body
// detections when no marks exist).
Orientation infer_orientation(const std::vector<Detection>& dets);

struct EventCluster {
    int anchor = -1;               // index into dets of the EventMark anchor, or -1
    std::vector<int> members;      // indices into dets (excludes the anchor)
    double axis_pos = 0.0;         // anchor/centroid projection onto the axis
    BBox anchor_box;               // the anchor bbox, or a synthesized 1x1 stand-in
};

// Group detections into per-event clusters. EventMarks become anchors and
// every other non-body detection joins the nearest anchor. Without any
// anchors, detections are clustered along the axis by 1-D gaps (a gap wider
// than gap_factor x the median element extent starts a new cluster).
// Throws NoElements when there is nothing to cluster.
std::vector<EventCluster> cluster_events(const std::vector<Detection>& dets,
                                         Orientation orientation,
                                         const RepairParams& params = {});

// Majority voting across clusters: if a category appears in more than half of
// the clusters, a cluster lacking it may relabel one of its members whose
// bbox shape matches the majority's (aspect within vote_aspect_tol, area
// within vote_area_tol) and whose own category is a minority. Returns the
// relabeled detection list (same order and boxes).
std::vector<Detection> fix_misclassified(const std::vector<Detection>& dets,
                                         const std::vector<EventCluster>& clusters,
                                         const RepairParams& params = {});

// Synthesize detections for majority categories missing from a cluster, at
// the median offset from the anchor with the median size. Recovered entries
// carry Provenance::Recovered, the configured score, and no mask.
std::vector<Detection> recover_missing(const std::vector<Detection>& dets,
                                       const std::vector<EventCluster>& clusters,
                                       const RepairParams& params = {});

struct RepairTrace {
    std::vector<Detection> raw;
    std::vector<Detection> after_nms;
    std::vector<Detection> after_nmm;
    std::vector<Detection> after_dedup;
    bool chose_merge = false;
    Orientation orientation = Orientation::Other;
    std::vector<Detection> after_vote;
    std::vector<Detection> after_recover;
};

// Full repair pipeline: dedup (NMS vs NMM by consistency), cluster, vote,
// recover. image_w/h feed the NMM ranking term.
std::vector<Detection> repair(const std::vector<Detection>& dets, int image_w, int image_h,
                              const RepairParams& params = {}, RepairTrace* trace = nullptr);

}  // namespace reconstruct
}  // namespace timelinekit
