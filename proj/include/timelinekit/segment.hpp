#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "timelinekit/geometry.hpp"
#include "timelinekit/image.hpp"
#include "timelinekit/types.hpp"

namespace timelinekit {
namespace segment {

enum class TrimapLabel : std::uint8_t { DefiniteBg = 0, ProbableBg = 1, ProbableFg = 2, DefiniteFg = 3 };

// Trimap over a region of interest of the source image. Pixels outside the
// bbox but inside the ROI margin give the optimizer background context.
struct Trimap {
    BBox roi;  // in image coordinates, clipped to the image
    std::vector<TrimapLabel> labels;  // roi.width * roi.height, row-major

    TrimapLabel at(int x, int y) const {  // roi-local coordinates
        return labels[static_cast<size_t>(y) * roi.width + x];
    }
    void set(int x, int y, TrimapLabel l) {
        labels[static_cast<size_t>(y) * roi.width + x] = l;
    }
};

// Build the initial trimap for one detection.
//  - bbox only: inside bbox -> ProbableFg, ROI ring outside bbox -> DefiniteBg.
//  - with a coarse mask (bbox-local): mask eroded by erode_px -> DefiniteFg,
//    the rest of the mask -> ProbableFg, pixels within context_px of the mask
//    -> ProbableBg, everything farther -> DefiniteBg. The foreground color
//    model is seeded by the mask alone, while the soft ring lets the cut grow
//    the mask by up to context_px — enough to recover artwork a detector box
//    clipped off, without letting the foreground bleed along same-colored
//    strokes that merely pass nearby. If erosion leaves nothing the mask is
//    too thin to trust and init falls back to bbox-only.
Trimap init_trimap(const Image& img, const BBox& bbox, const PixelMask* mask = nullptr,
                   int margin = 10, double erode_px = 2.0, double context_px = 3.0);

// Full-covariance RGB Gaussian mixture fitted by hard-assignment EM.
struct GmmComponent {
    double weight = 0.0;
    std::array<double, 3> mean{};
    std::array<double, 9> cov{};       // row-major 3x3 (regularized)
    std::array<double, 9> inv_cov{};   // cached inverse
    double log_norm = 0.0;             // log( weight / sqrt((2pi)^3 det) )
};

struct Gmm {
    std::vector<GmmComponent> comps;

    // -log sum_k w_k N(x | mu_k, Sigma_k); the graph-cut data term.
    double neg_log_likelihood(const std::array<double, 3>& x) const;
    int most_likely_component(const std::array<double, 3>& x) const;
};

// Fit K components by hard EM: deterministic farthest-point init, assign to
// the best component, re-estimate until assignments stabilize. Covariances
// are regularized with +1e-3 * I. Throws DegenerateInput on an empty sample;
// fewer samples than K degrades to one component per sample.
Gmm fit_gmm(const std::vector<std::array<double, 3>>& pixels, int k);

struct GrabCutParams {
    int gmm_components = 5;
    double gamma = 50.0;       // smoothness weight
    int max_iterations = 5;
    double convergence_tol = 1e-4;  // relative energy improvement to keep going
    int roi_margin = 10;
    double mask_erode_px = 2.0;     // coarse-mask -> DefiniteFg erosion
    double mask_context_px = 3.0;   // the cut may grow the mask by up to this
};

struct GrabCutStats {
    std::vector<double> energies;  // total energy after each graph-cut solve
    int iterations = 0;
};

// Iterated graph-cut foreground extraction over the trimap ROI. Returns the
// foreground mask in ROI-local coordinates (same dims as trimap.labels).
// Definite labels are hard constraints. The reported energy sequence is
// non-increasing: an iteration that would raise the energy is rolled back and
// iteration stops. A trimap with no unknown pixels short-circuits (definite
// foreground returned verbatim, zero iterations).
PixelMask grabcut(const Image& img, const Trimap& trimap, const GrabCutParams& params = {},
                  GrabCutStats* stats = nullptr);

// Convenience wrapper used by the template extractor: build the trimap from
// the detection's bbox (+ mask if present), run grabcut, return the result
// cropped to the bbox as a bbox-local mask. Guarantees at least one pixel.
PixelMask refine_detection_mask(const Image& img, const Detection& det,
                                const GrabCutParams& params = {}, GrabCutStats* stats = nullptr);

// Refinement with a sanity guard: when the detection already carries a mask
// and the refined pixel count leaves [0.3x, 3x] of the original, the original
// is kept — a swing that large means the color models collapsed, not that the
// mask improved. Thin or text-like artwork (main body, text strokes) is safer
// refined by hand upstream, so callers pick which categories to pass here.
PixelMask guarded_refine(const Image& img, const Detection& det, const GrabCutParams& params = {});

// Re-fit a whole detection to the refined segmentation. The cut's foreground
// components that touch the input mask (largest component when none do) define
// the element's support; the box snaps to its tight hull and the mask is
// re-anchored there, so a box that clipped the artwork is pulled back onto it.
// Guards keep the input detection unchanged whenever the refit cannot be
// trusted: no input mask (or one too thin to survive erosion), a support that
// collapses or balloons (pixel count outside [0.3x, 3x] of the input mask), a
// hull that fails to explain the input box's extent (hull-vs-input box IoU
// below 0.5 — a fragment-sized box is worse than the detector's), or a cut
// that erased part of its own seed (under 95% of the input mask retained —
// the sign of collapsed color models rather than a better support).
Detection refine_detection(const Image& img, const Detection& det,
                           const GrabCutParams& params = {});

}  // namespace segment
}  // namespace timelinekit
