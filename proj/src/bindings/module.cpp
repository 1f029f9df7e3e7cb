// Python surface: the pipeline's main operations over the wire formats.
// Images cross the boundary as PNG bytes, structured data as JSON strings —
// the same formats the CLI reads and writes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "timelinekit/config.hpp"
#include "timelinekit/detsim.hpp"
#include "timelinekit/errors.hpp"
#include "timelinekit/eval.hpp"
#include "timelinekit/geometry.hpp"
#include "timelinekit/image.hpp"
#include "timelinekit/reconstruct.hpp"
#include "timelinekit/render.hpp"
#include "timelinekit/rng.hpp"
#include "timelinekit/synth.hpp"
#include "timelinekit/template_doc.hpp"
#include "timelinekit/wire.hpp"

namespace py = pybind11;
using namespace timelinekit;

namespace {

py::bytes png_of(const Image& img) {
    ImageRgba rgba(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* s = img.px(x, y);
            std::uint8_t* d = rgba.px(x, y);
            d[0] = s[0];
            d[1] = s[1];
            d[2] = s[2];
            d[3] = 255;
        }
    std::vector<std::uint8_t> bytes = encode_png(rgba);
    return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

Image image_of(const py::bytes& png) {
    std::string s = png;
    ImageRgba rgba = decode_png(std::vector<std::uint8_t>(s.begin(), s.end()));
    Image img(rgba.width, rgba.height);
    for (int y = 0; y < rgba.height; ++y)
        for (int x = 0; x < rgba.width; ++x) {
            const std::uint8_t* p = rgba.px(x, y);
            img.set(x, y, Rgb{p[0], p[1], p[2]});
        }
    return img;
}

BBox bbox_of(const std::vector<int>& b) {
    if (b.size() != 4) throw DegenerateInput("bbox must be [top, left, width, height]");
    return BBox{b[0], b[1], b[2], b[3]};
}

AnnotatedTimeline timeline_of(const py::bytes& png, const std::string& annotation_json) {
    wire::AnnotationFile ann = wire::annotation_from_json(annotation_json);
    return AnnotatedTimeline{image_of(png), ann.global, ann.elements, ann.events};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "timeline infographic toolkit: synthesize, perturb, repair, extract, render, "
              "evaluate";

    py::register_exception<Error>(m, "TimelinekitError");

    m.def(
        "iou",
        [](const std::vector<int>& a, const std::vector<int>& b) {
            return iou(bbox_of(a), bbox_of(b));
        },
        py::arg("a"), py::arg("b"),
        "Pixel-discrete IoU of two [top, left, width, height] boxes.");

    m.def(
        "generate",
        [](std::uint64_t seed) {
            for (int attempt = 0;; ++attempt) {
                const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(attempt));
                try {
                    synth::TimelineSpec spec = synth::sample_spec(s);
                    std::vector<EventDatum> data = synth::sample_events(spec, derive_seed(s, 1));
                    AnnotatedTimeline tl = synth::generate(spec, data, derive_seed(s, 2));
                    wire::AnnotationFile f;
                    f.image = "inline.png";
                    f.width = tl.image.width;
                    f.height = tl.image.height;
                    f.global = tl.global;
                    f.elements = tl.elements;
                    f.events = tl.events;
                    f.data = data;
                    return py::make_tuple(png_of(tl.image), wire::to_json(f));
                } catch (const LayoutOverflow&) {
                    if (attempt >= 20) throw;
                }
            }
        },
        py::arg("seed"),
        "Generate one labeled synthetic timeline. Returns (png_bytes, annotation_json).");

    m.def(
        "simulate",
        [](const py::bytes& png, const std::string& annotation_json, std::uint64_t seed,
           double duplicate_rate, double drop_rate, double misclassify_rate, double jitter_px) {
            AnnotatedTimeline tl = timeline_of(png, annotation_json);
            detsim::NoiseProfile noise;
            noise.duplicate_rate = duplicate_rate;
            noise.drop_rate = drop_rate;
            noise.misclassify_rate = misclassify_rate;
            noise.jitter_px = jitter_px;
            wire::DetectionFile df;
            df.image = "inline.png";
            df.width = tl.image.width;
            df.height = tl.image.height;
            df.detections = detsim::perturb(tl, noise, seed);
            return wire::to_json(df);
        },
        py::arg("png"), py::arg("annotation_json"), py::arg("seed"),
        py::arg("duplicate_rate") = 0.05, py::arg("drop_rate") = 0.05,
        py::arg("misclassify_rate") = 0.03, py::arg("jitter_px") = 2.0,
        "Simulate a noisy detector on ground truth. Returns a detections JSON string.");

    m.def(
        "repair",
        [](const std::string& detections_json) {
            wire::DetectionFile df = wire::detections_from_json(detections_json);
            wire::DetectionFile out = df;
            out.detections =
                reconstruct::repair(df.detections, df.width, df.height);
            return wire::to_json(out);
        },
        py::arg("detections_json"),
        "Dedup (NMS/NMM), vote out misclassifications, recover missing elements.");

    m.def(
        "extract",
        [](const py::bytes& png, const std::string& annotation_json, bool refine_masks) {
            wire::AnnotationFile ann = wire::annotation_from_json(annotation_json);
            Image img = image_of(png);
            std::vector<Detection> dets;
            dets.reserve(ann.elements.size());
            for (const Element& e : ann.elements)
                dets.push_back(Detection{e.category, 0.9, e.bbox, e.mask, Provenance::Detected});
            tpl::ExtractParams params;
            params.refine_masks = refine_masks;
            return tpl::serialize(tpl::extract_template(img, ann.global, dets, params));
        },
        py::arg("png"), py::arg("annotation_json"), py::arg("refine_masks") = true,
        "Extract a reusable template document (JSON string) from an annotated bitmap.");

    m.def(
        "render",
        [](const std::string& template_json, const std::string& events_json) {
            render::RenderJob job;
            job.doc = tpl::deserialize(template_json);
            job.data = wire::events_from_json(events_json);
            render::RenderResult res = render::render(job);
            py::list placed;
            for (const render::PlacedElement& e : res.elements) {
                py::dict d;
                d["category"] = to_string(e.category);
                d["bbox"] = py::make_tuple(e.bbox.top, e.bbox.left, e.bbox.width, e.bbox.height);
                placed.append(d);
            }
            return py::make_tuple(res.svg, png_of(res.bitmap), placed);
        },
        py::arg("template_json"), py::arg("events_json"),
        "Render events ({\"events\": [{time, label, icon?}]}) through a template. "
        "Returns (svg, png_bytes, placed_elements).");

    m.def(
        "evaluate",
        [](const std::vector<std::string>& annotation_jsons,
           const std::vector<std::string>& detection_jsons, double iou_thresh, bool use_masks) {
            if (annotation_jsons.size() != detection_jsons.size())
                throw DegenerateInput("annotation/detection list lengths differ");
            std::vector<eval::LabeledImage> images;
            long long tp = 0, fp = 0, n_gt = 0;
            eval::MatchOptions opt;
            opt.iou_thresh = iou_thresh;
            opt.use_masks = use_masks;
            for (size_t i = 0; i < annotation_jsons.size(); ++i) {
                images.push_back(eval::LabeledImage{
                    wire::detections_from_json(detection_jsons[i]).detections,
                    wire::annotation_from_json(annotation_jsons[i]).elements});
                eval::MatchResult r = eval::match_detections(images.back().preds,
                                                             images.back().gts, opt);
                tp += r.tp;
                fp += r.fp;
                n_gt += r.num_gt;
            }
            py::dict out;
            out["ap"] = eval::corpus_ap(images, iou_thresh, use_masks);
            out["ap50_95"] = eval::ap_range(images, use_masks);
            out["precision"] = tp + fp ? static_cast<double>(tp) / (tp + fp) : 1.0;
            out["recall"] = n_gt ? static_cast<double>(tp) / n_gt : 1.0;
            out["tp"] = tp;
            out["fp"] = fp;
            out["gt"] = n_gt;
            return out;
        },
        py::arg("annotation_jsons"), py::arg("detection_jsons"), py::arg("iou_thresh") = 0.5,
        py::arg("use_masks") = false,
        "Greedy COCO-style matching over a corpus: AP plus micro precision/recall.");

    m.def("default_config", [] { return config::config_json(config::PipelineConfig{}); },
          "The pipeline config JSON with every field at its default.");
}
