#pragma once

#include <cstdint>
#include <vector>

#include "timelinekit/types.hpp"

namespace timelinekit {
namespace detsim {

// Confidence models for simulated detections: true positives draw from a
// truncated normal around mu_tp, spurious boxes around mu_fp. Zero sigma
// collapses to the mean exactly.
struct ScoreModel {
    double mu_tp = 0.9;
    double sigma_tp = 0.05;
    double mu_fp = 0.45;
    double sigma_fp = 0.15;
};

// Detector noise. All rates are per-element probabilities; jitter_px is the
// standard deviation of independent Gaussian edge offsets.
struct NoiseProfile {
    double duplicate_rate = 0.0;
    double drop_rate = 0.0;
    double misclassify_rate = 0.0;
    double jitter_px = 0.0;
    double mask_coarsen_px = 0.0;   // random dilate/erode radius applied to masks
    double hallucination_rate = 0.0;  // spurious boxes per element
    ScoreModel score;
};

// Simulate a detector on ground truth: drop, jitter, coarsen, misclassify,
// duplicate, hallucinate — deterministically per seed. An all-zero profile
// returns the ground truth verbatim (score = mu_tp when sigma_tp == 0).
// Duplicates overlap their source (IoU >= 0.3) and draw false-positive
// scores; masks follow their boxes (re-anchored after jitter, never empty).
std::vector<Detection> perturb(const AnnotatedTimeline& gt, const NoiseProfile& noise,
                               std::uint64_t seed);

}  // namespace detsim
}  // namespace timelinekit
