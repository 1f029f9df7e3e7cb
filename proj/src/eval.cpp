#include "timelinekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "timelinekit/errors.hpp"
#include "timelinekit/geometry.hpp"
#include "timelinekit/rng.hpp"

namespace timelinekit {
namespace eval {

MatchResult match_detections(const std::vector<Detection>& preds, const std::vector<Element>& gts,
                             const MatchOptions& opt) {
    MatchResult out;
    out.gt_per_category.assign(static_cast<size_t>(kNumCategories), 0);
    for (const Element& g : gts) ++out.gt_per_category[static_cast<size_t>(g.category)];
    out.num_gt = static_cast<int>(gts.size());

    std::vector<int> order;
    for (size_t i = 0; i < preds.size(); ++i) {
        const Detection& p = preds[i];
        if (!opt.include_recovered && p.provenance == Provenance::Recovered) continue;
        if (opt.use_masks && !p.mask) continue;  // nothing to compare; skip, not FP
        order.push_back(static_cast<int>(i));
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return preds[static_cast<size_t>(a)].score >
                                                preds[static_cast<size_t>(b)].score; });

    std::vector<bool> taken(gts.size(), false);
    for (int pi : order) {
        const Detection& p = preds[static_cast<size_t>(pi)];
        double best_iou = 0.0;
        int best = -1;
        for (size_t gi = 0; gi < gts.size(); ++gi) {
            if (taken[gi] || gts[gi].category != p.category) continue;
            double v = opt.use_masks
                           ? mask_iou(p.bbox, *p.mask, gts[gi].bbox, gts[gi].mask)
                           : iou(p.bbox, gts[gi].bbox);
            if (v >= opt.iou_thresh && v > best_iou) {
                best_iou = v;
                best = static_cast<int>(gi);
            }
        }
        PredOutcome o;
        o.category = p.category;
        o.score = p.score;
        if (best >= 0) {
            taken[static_cast<size_t>(best)] = true;
            o.tp = true;
            o.gt_index = best;
            ++out.tp;
        } else {
            ++out.fp;
        }
        out.preds.push_back(o);
    }
    return out;
}

namespace {

// 101-point interpolated AP for one category from pooled (score, tp) pairs.
double interpolated_ap(std::vector<std::pair<double, bool>> scored, int n_gt) {
    if (n_gt == 0) return 0.0;
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> precision, recall;
    int tp = 0, fp = 0;
    for (const auto& [score, is_tp] : scored) {
        (is_tp ? tp : fp)++;
        precision.push_back(static_cast<double>(tp) / (tp + fp));
        recall.push_back(static_cast<double>(tp) / n_gt);
    }
    // precision envelope: best precision at any recall >= r
    double ap = 0.0;
    for (int k = 0; k <= 100; ++k) {
        double r = k / 100.0;
        double best = 0.0;
        for (size_t i = 0; i < precision.size(); ++i)
            if (recall[i] >= r - 1e-12) best = std::max(best, precision[i]);
        ap += best;
    }
    return ap / 101.0;
}

}  // namespace

double corpus_ap(const std::vector<LabeledImage>& images, double iou_t, bool use_masks,
                 bool include_recovered) {
    MatchOptions opt;
    opt.iou_thresh = iou_t;
    opt.use_masks = use_masks;
    opt.include_recovered = include_recovered;

    std::vector<std::vector<std::pair<double, bool>>> scored(static_cast<size_t>(kNumCategories));
    std::vector<int> n_gt(static_cast<size_t>(kNumCategories), 0);
    for (const LabeledImage& img : images) {
        MatchResult m = match_detections(img.preds, img.gts, opt);
        for (size_t c = 0; c < n_gt.size(); ++c) n_gt[c] += m.gt_per_category[c];
        for (const PredOutcome& p : m.preds)
            scored[static_cast<size_t>(p.category)].emplace_back(p.score, p.tp);
    }
    double sum = 0.0;
    int cats = 0;
    for (size_t c = 0; c < n_gt.size(); ++c) {
        if (n_gt[c] == 0) continue;
        sum += interpolated_ap(scored[c], n_gt[c]);
        ++cats;
    }
    if (cats == 0) throw NoGroundTruth("no ground-truth elements in any category");
    return sum / cats;
}

double average_precision(const std::vector<Detection>& preds, const std::vector<Element>& gts,
                         double iou_t, bool use_masks) {
    return corpus_ap({LabeledImage{preds, gts}}, iou_t, use_masks);
}

double ap_range(const std::vector<LabeledImage>& images, bool use_masks, bool include_recovered) {
    double sum = 0.0;
    int n = 0;
    for (int k = 50; k <= 95; k += 5) {
        sum += corpus_ap(images, k / 100.0, use_masks, include_recovered);
        ++n;
    }
    return sum / n;
}

// ---- gain report ---------------------------------------------------------------

namespace {

struct Counts {
    long long tp = 0, fp = 0, n_gt = 0;
    void add(const MatchResult& m) {
        tp += m.tp;
        fp += m.fp;
        n_gt += m.num_gt;
    }
    double precision() const { return tp + fp ? 100.0 * tp / (tp + fp) : 100.0; }
    double recall() const { return n_gt ? 100.0 * tp / n_gt : 100.0; }
};

constexpr int kStages = 4;
const char* kStageNames[kStages] = {"Raw", "+NMM", "+RR", "+DLGC"};

// tp/fp/gt per stage x {bbox50, bbox75, mask50, mask75}
struct StageCounts {
    Counts cell[kStages][4];
};

void accumulate_image(const AnnotatedTimeline& gt_img, const detsim::NoiseProfile& noise,
                      std::uint64_t seed, const GainConfig& cfg, StageCounts* acc) {
    std::vector<Detection> raw = detsim::perturb(gt_img, noise, seed);

    reconstruct::RepairTrace trace;
    reconstruct::repair(raw, gt_img.image.width, gt_img.image.height, cfg.repair, &trace);

    std::vector<Detection> refined = trace.after_recover;
    if (cfg.refine_masks) {
        for (Detection& d : refined) {
            if (!d.mask) continue;
            if (d.category == ElementCategory::EventMark ||
                d.category == ElementCategory::AnnotationMark ||
                d.category == ElementCategory::AnnotationIcon)
                d = segment::refine_detection(gt_img.image, d, cfg.grabcut);
        }
    }

    const std::vector<Detection>* stages[kStages] = {&raw, &trace.after_dedup,
                                                     &trace.after_recover, &refined};
    for (int s = 0; s < kStages; ++s) {
        for (int m = 0; m < 4; ++m) {
            MatchOptions opt;
            opt.iou_thresh = (m % 2) ? 0.75 : 0.5;
            opt.use_masks = m >= 2;
            opt.include_recovered = true;  // the recovery stage is being measured
            acc->cell[s][m].add(match_detections(*stages[s], gt_img.elements, opt));
        }
    }
}

StageMetrics metrics_of(const StageCounts& acc, int s, const char* name) {
    StageMetrics out;
    out.name = name;
    out.bbox_p50 = acc.cell[s][0].precision();
    out.bbox_r50 = acc.cell[s][0].recall();
    out.bbox_p75 = acc.cell[s][1].precision();
    out.bbox_r75 = acc.cell[s][1].recall();
    out.mask_p50 = acc.cell[s][2].precision();
    out.mask_r50 = acc.cell[s][2].recall();
    out.mask_p75 = acc.cell[s][3].precision();
    out.mask_r75 = acc.cell[s][3].recall();
    return out;
}

}  // namespace

GainReport gain_report(const std::vector<AnnotatedTimeline>& corpus,
                       const detsim::NoiseProfile& noise, const GainConfig& cfg) {
    const int runs = std::max(1, cfg.runs);
    // per-(run,image) partial counts, reduced in a fixed order so the result
    // is independent of the thread count
    std::vector<StageCounts> parts(corpus.size());
    std::vector<StageMetrics> mean(kStages);
    for (int s = 0; s < kStages; ++s) mean[static_cast<size_t>(s)].name = kStageNames[s];

    for (int run = 0; run < runs; ++run) {
        for (StageCounts& p : parts) p = StageCounts{};
        const std::uint64_t run_seed = derive_seed(cfg.seed, 0x9a1e0000u + static_cast<std::uint64_t>(run));

        auto work = [&](size_t begin, size_t end) {
            for (size_t i = begin; i < end; ++i)
                accumulate_image(corpus[i], noise, derive_seed(run_seed, i), cfg, &parts[i]);
        };
        int jobs = std::max(1, cfg.jobs);
        if (jobs == 1 || corpus.size() < 2) {
            work(0, corpus.size());
        } else {
            std::vector<std::thread> threads;
            size_t chunk = (corpus.size() + jobs - 1) / jobs;
            for (size_t b = 0; b < corpus.size(); b += chunk)
                threads.emplace_back(work, b, std::min(corpus.size(), b + chunk));
            for (std::thread& t : threads) t.join();
        }

        StageCounts total;
        for (const StageCounts& p : parts)
            for (int s = 0; s < kStages; ++s)
                for (int m = 0; m < 4; ++m) {
                    total.cell[s][m].tp += p.cell[s][m].tp;
                    total.cell[s][m].fp += p.cell[s][m].fp;
                    total.cell[s][m].n_gt += p.cell[s][m].n_gt;
                }
        for (int s = 0; s < kStages; ++s) {
            StageMetrics m = metrics_of(total, s, kStageNames[s]);
            StageMetrics& acc = mean[static_cast<size_t>(s)];
            acc.bbox_p50 += m.bbox_p50 / runs;
            acc.bbox_r50 += m.bbox_r50 / runs;
            acc.bbox_p75 += m.bbox_p75 / runs;
            acc.bbox_r75 += m.bbox_r75 / runs;
            acc.mask_p50 += m.mask_p50 / runs;
            acc.mask_r50 += m.mask_r50 / runs;
            acc.mask_p75 += m.mask_p75 / runs;
            acc.mask_r75 += m.mask_r75 / runs;
        }
    }

    GainReport report;
    report.stages = mean;
    report.deltas.resize(kStages);
    for (int s = 0; s < kStages; ++s) {
        StageMetrics d;
        d.name = kStageNames[s];
        if (s > 0) {
            const StageMetrics& a = mean[static_cast<size_t>(s - 1)];
            const StageMetrics& b = mean[static_cast<size_t>(s)];
            d.bbox_p50 = b.bbox_p50 - a.bbox_p50;
            d.bbox_r50 = b.bbox_r50 - a.bbox_r50;
            d.bbox_p75 = b.bbox_p75 - a.bbox_p75;
            d.bbox_r75 = b.bbox_r75 - a.bbox_r75;
            d.mask_p50 = b.mask_p50 - a.mask_p50;
            d.mask_r50 = b.mask_r50 - a.mask_r50;
            d.mask_p75 = b.mask_p75 - a.mask_p75;
            d.mask_r75 = b.mask_r75 - a.mask_r75;
        }
        report.deltas[static_cast<size_t>(s)] = std::move(d);
    }
    return report;
}

namespace {

void csv_row(std::ostringstream& out, const StageMetrics& m, const char* kind) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%s,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n", m.name.c_str(),
                  kind, m.bbox_p50, m.bbox_r50, m.bbox_p75, m.bbox_r75, m.mask_p50, m.mask_r50,
                  m.mask_p75, m.mask_r75);
    out << buf;
}

}  // namespace

std::string gain_csv(const GainReport& report) {
    std::ostringstream out;
    out << "stage,kind,bbox_p50,bbox_r50,bbox_p75,bbox_r75,mask_p50,mask_r50,mask_p75,mask_r75\n";
    for (const StageMetrics& m : report.stages) csv_row(out, m, "value");
    for (const StageMetrics& m : report.deltas) csv_row(out, m, "delta");
    return out.str();
}

std::string gain_table(const GainReport& report) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-8s %31s  %31s\n", "", "bbox (P50 R50 P75 R75)",
                  "mask (P50 R50 P75 R75)");
    out << buf;
    for (size_t i = 0; i < report.stages.size(); ++i) {
        const StageMetrics& m = report.stages[i];
        std::snprintf(buf, sizeof buf,
                      "%-8s %7.2f %7.2f %7.2f %7.2f  %7.2f %7.2f %7.2f %7.2f\n", m.name.c_str(),
                      m.bbox_p50, m.bbox_r50, m.bbox_p75, m.bbox_r75, m.mask_p50, m.mask_r50,
                      m.mask_p75, m.mask_r75);
        out << buf;
        if (i > 0) {
            const StageMetrics& d = report.deltas[i];
            std::snprintf(buf, sizeof buf,
                          "%-8s %+7.2f %+7.2f %+7.2f %+7.2f  %+7.2f %+7.2f %+7.2f %+7.2f\n",
                          "  delta", d.bbox_p50, d.bbox_r50, d.bbox_p75, d.bbox_r75, d.mask_p50,
                          d.mask_r50, d.mask_p75, d.mask_r75);
            out << buf;
        }
    }
    return out.str();
}

}  // namespace eval
}  // namespace timelinekit
