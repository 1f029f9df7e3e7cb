// timeline-kit: synthesize, perturb, repair, extract, render, evaluate.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "timelinekit/config.hpp"
#include "timelinekit/detsim.hpp"
#include "timelinekit/errors.hpp"
#include "timelinekit/eval.hpp"
#include "timelinekit/image.hpp"
#include "timelinekit/reconstruct.hpp"
#include "timelinekit/render.hpp"
#include "timelinekit/rng.hpp"
#include "timelinekit/synth.hpp"
#include "timelinekit/template_doc.hpp"
#include "timelinekit/wire.hpp"

namespace fs = std::filesystem;
using namespace timelinekit;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string config_path;
    bool trace = false;
    int jobs = 1;
    config::PipelineConfig cfg;
    bool have_config = false;
};

std::pair<int, int> parse_canvas(const std::string& s) {
    int w = 0, h = 0;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%dx%d%c", &w, &h, &extra) != 2 || w < 1 || h < 1)
        throw CLI::ValidationError("--canvas", "expected WIDTHxHEIGHT, e.g. 640x400");
    return {w, h};
}

// All *.json files in a directory (sorted), or the single file itself.
std::vector<fs::path> collect_json(const std::string& path) {
    fs::path p(path);
    std::vector<fs::path> out;
    if (fs::is_directory(p)) {
        for (const auto& e : fs::directory_iterator(p))
            if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
        std::sort(out.begin(), out.end());
        if (out.empty()) throw IoError("no .json files in " + path);
    } else {
        if (!fs::exists(p)) throw IoError("no such file: " + path);
        out.push_back(p);
    }
    return out;
}

// The bitmap an annotation refers to, resolved next to the annotation file.
Image load_referenced_image(const fs::path& ann_path, const wire::AnnotationFile& ann) {
    fs::path img(ann.image);
    if (img.is_relative()) img = ann_path.parent_path() / img;
    return load_png(img.string());
}

std::vector<Detection> elements_as_detections(const wire::AnnotationFile& ann, double score) {
    std::vector<Detection> dets;
    dets.reserve(ann.elements.size());
    for (const Element& e : ann.elements)
        dets.push_back(Detection{e.category, score, e.bbox, e.mask, Provenance::Detected});
    return dets;
}

std::string image_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "img_%04d", index);
    return buf;
}

struct SynthOutput {
    AnnotatedTimeline tl;
    std::vector<EventDatum> data;
};

// One synthesized timeline; layout collisions and seed-dependent infeasible
// samples retry with a derived seed so the whole corpus stays deterministic.
SynthOutput synth_one(std::uint64_t seed, int index, const synth::SpecConstraints& c) {
    const std::uint64_t base = derive_seed(seed, static_cast<std::uint64_t>(index));
    for (int attempt = 0;; ++attempt) {
        const std::uint64_t s = derive_seed(base, static_cast<std::uint64_t>(attempt));
        try {
            synth::TimelineSpec spec = synth::sample_spec(s, c);
            std::vector<EventDatum> data = synth::sample_events(spec, derive_seed(s, 1));
            return SynthOutput{synth::generate(spec, data, derive_seed(s, 2)), std::move(data)};
        } catch (const LayoutOverflow&) {
            if (attempt >= 20) throw;
        } catch (const InfeasibleConstraint&) {
            if (attempt >= 20) throw;
        }
    }
}

// Without a config, simulate a representative detector rather than a perfect
// one: duplicates, drops, label swaps, edge jitter.
detsim::NoiseProfile effective_noise(const Globals& g) {
    if (g.have_config) return g.cfg.noise;
    detsim::NoiseProfile noise;
    noise.duplicate_rate = 0.05;
    noise.drop_rate = 0.05;
    noise.misclassify_rate = 0.03;
    noise.jitter_px = 2.0;
    return noise;
}

synth::SpecConstraints constraints_from(const Globals& g, const std::optional<std::string>& canvas,
                                        std::optional<int> events) {
    synth::SpecConstraints c;
    if (canvas)
        c.canvas = parse_canvas(*canvas);
    else if (g.cfg.canvas_width && g.cfg.canvas_height)
        c.canvas = std::make_pair(*g.cfg.canvas_width, *g.cfg.canvas_height);
    if (events)
        c.n_events = *events;
    else if (g.cfg.n_events)
        c.n_events = *g.cfg.n_events;
    return c;
}

// ---- verbs -----------------------------------------------------------------

int cmd_synth_gen(const Globals& g, const std::string& out_dir, int count,
                  const std::optional<std::string>& canvas, std::optional<int> events) {
    fs::create_directories(out_dir);
    synth::SpecConstraints c = constraints_from(g, canvas, events);
    for (int i = 0; i < count; ++i) {
        SynthOutput s = synth_one(g.seed, i, c);
        std::string name = image_name(i);
        save_png(s.tl.image, (fs::path(out_dir) / (name + ".png")).string());
        wire::AnnotationFile f;
        f.image = name + ".png";
        f.width = s.tl.image.width;
        f.height = s.tl.image.height;
        f.global = s.tl.global;
        f.elements = s.tl.elements;
        f.events = s.tl.events;
        f.data = std::move(s.data);  // the payload cannot be re-derived from pixels
        wire::save_annotation((fs::path(out_dir) / (name + ".json")).string(), f);
        if (g.trace) std::cerr << "synth " << name << "\n";
    }
    std::cout << "wrote " << count << " timelines to " << out_dir << "\n";
    return 0;
}

int cmd_detect_sim(const Globals& g, const std::string& ann_path, const std::string& out_path) {
    std::vector<fs::path> anns = collect_json(ann_path);
    const bool dir_mode = anns.size() > 1 || fs::is_directory(out_path) ||
                          fs::path(out_path).extension() != ".json";
    if (dir_mode) {
        fs::create_directories(out_path);
        if (fs::equivalent(fs::path(out_path), anns[0].parent_path()))
            throw IoError("detect-sim output directory must differ from the annotation directory");
    }
    for (size_t i = 0; i < anns.size(); ++i) {
        wire::AnnotationFile ann = wire::load_annotation(anns[i].string());
        AnnotatedTimeline tl{load_referenced_image(anns[i], ann), ann.global, ann.elements,
                             ann.events};
        wire::DetectionFile df;
        df.image = ann.image;
        df.width = ann.width;
        df.height = ann.height;
        df.detections = detsim::perturb(tl, effective_noise(g), derive_seed(g.seed, i));
        fs::path out = dir_mode ? fs::path(out_path) / anns[i].filename() : fs::path(out_path);
        wire::save_detections(out.string(), df);
        if (g.trace) std::cerr << "detect-sim " << anns[i].filename().string() << "\n";
    }
    std::cout << "simulated detections for " << anns.size() << " image(s)\n";
    return 0;
}

void write_trace_stage(const fs::path& out, const char* stage, const wire::DetectionFile& base,
                       const std::vector<Detection>& dets) {
    wire::DetectionFile df = base;
    df.detections = dets;
    fs::path p = out.parent_path() / (out.stem().string() + ".trace-" + stage + ".json");
    wire::save_detections(p.string(), df);
}

int cmd_reconstruct(const Globals& g, const std::string& dets_path, const std::string& out_path) {
    std::vector<fs::path> files = collect_json(dets_path);
    const bool dir_mode = files.size() > 1 || fs::is_directory(out_path) ||
                          fs::path(out_path).extension() != ".json";
    if (dir_mode) fs::create_directories(out_path);
    for (const fs::path& f : files) {
        wire::DetectionFile df = wire::load_detections(f.string());
        reconstruct::RepairTrace trace;
        std::vector<Detection> repaired = reconstruct::repair(
            df.detections, df.width, df.height, g.cfg.repair, g.trace ? &trace : nullptr);
        fs::path out = dir_mode ? fs::path(out_path) / f.filename() : fs::path(out_path);
        wire::DetectionFile out_file = df;
        out_file.detections = repaired;
        wire::save_detections(out.string(), out_file);
        if (g.trace) {
            write_trace_stage(out, "nms", df, trace.after_nms);
            write_trace_stage(out, "nmm", df, trace.after_nmm);
            write_trace_stage(out, "dedup", df, trace.after_dedup);
            write_trace_stage(out, "vote", df, trace.after_vote);
            write_trace_stage(out, "recover", df, trace.after_recover);
            std::cerr << f.filename().string() << ": dedup chose "
                      << (trace.chose_merge ? "merge" : "suppress") << ", orientation "
                      << to_string(trace.orientation) << "\n";
        }
    }
    std::cout << "repaired " << files.size() << " detection file(s)\n";
    return 0;
}

int cmd_extract(const Globals& g, const std::string& ann_path,
                const std::optional<std::string>& dets_path, const std::string& out_path) {
    fs::path ap(ann_path);
    wire::AnnotationFile ann = wire::load_annotation(ap.string());
    Image img = load_referenced_image(ap, ann);
    std::vector<Detection> dets = dets_path
                                      ? wire::load_detections(*dets_path).detections
                                      : elements_as_detections(ann, 0.9);
    tpl::ExtractParams params;
    params.grabcut = g.cfg.grabcut;
    params.refine_masks = g.cfg.refine_masks;
    tpl::TemplateDoc doc = tpl::extract_template(img, ann.global, dets, params);
    tpl::save_template(doc, out_path);
    std::cout << "template with " << doc.event_slots.size() << " slot(s), "
              << doc.reusable.size() << " reusable + " << doc.updatable.size()
              << " updatable element(s) -> " << out_path << "\n";
    return 0;
}

int cmd_render(const Globals&, const std::string& template_path, const std::string& data_path,
               const std::optional<std::string>& out_png, const std::optional<std::string>& out_svg,
               const std::optional<std::string>& out_layout,
               const std::optional<std::string>& canvas, const std::optional<std::string>& scale,
               const std::optional<std::string>& rep_source, bool no_loop) {
    render::RenderJob job;
    job.doc = tpl::load_template(template_path);
    job.data = wire::events_from_json(wire::read_text_file(data_path));
    if (canvas) {
        auto [w, h] = parse_canvas(*canvas);
        job.options.canvas_width = w;
        job.options.canvas_height = h;
    }
    if (scale) {
        auto s = parse_scale(*scale);
        if (!s)
            throw CLI::ValidationError("--scale", "unknown scale '" + *scale + "'");
        job.options.scale_override = *s;
    }
    job.options.allow_looping = !no_loop;
    if (rep_source) job = render::transfer_representation(std::move(job), tpl::load_template(*rep_source));

    render::RenderResult res = render::render(job);
    if (out_png) save_png(res.bitmap, *out_png);
    if (out_svg) wire::write_text_file(*out_svg, res.svg);
    if (out_layout) {
        // placed geometry for debugging / downstream checks
        std::string j = "{\n  \"width\": " + std::to_string(res.bitmap.width) +
                        ",\n  \"height\": " + std::to_string(res.bitmap.height) +
                        ",\n  \"elements\": [";
        for (size_t i = 0; i < res.elements.size(); ++i) {
            const render::PlacedElement& e = res.elements[i];
            j += std::string(i ? "," : "") + "\n    {\"category\": \"" + to_string(e.category) +
                 "\", \"bbox\": [" + std::to_string(e.bbox.top) + ", " +
                 std::to_string(e.bbox.left) + ", " + std::to_string(e.bbox.width) + ", " +
                 std::to_string(e.bbox.height) + "]}";
        }
        j += "\n  ],\n  \"events\": [";
        for (size_t i = 0; i < res.events.size(); ++i) {
            j += std::string(i ? "," : "") + "\n    [";
            for (size_t m = 0; m < res.events[i].size(); ++m)
                j += std::string(m ? ", " : "") + std::to_string(res.events[i][m]);
            j += "]";
        }
        j += "\n  ]\n}\n";
        wire::write_text_file(*out_layout, j);
    }
    std::cout << "rendered " << job.data.size() << " event(s) at " << res.bitmap.width << "x"
              << res.bitmap.height << "\n";
    return 0;
}

int cmd_evaluate(const std::string& ann_path, const std::string& dets_path,
                 const std::optional<std::string>& out_path, bool include_recovered) {
    std::vector<fs::path> anns = collect_json(ann_path);
    std::vector<fs::path> dets = collect_json(dets_path);

    // pair by identical basename when both sides are directories
    std::vector<eval::LabeledImage> images;
    if (anns.size() == 1 && dets.size() == 1) {
        images.push_back(eval::LabeledImage{wire::load_detections(dets[0].string()).detections,
                                            wire::load_annotation(anns[0].string()).elements});
    } else {
        for (const fs::path& a : anns) {
            auto it = std::find_if(dets.begin(), dets.end(), [&](const fs::path& d) {
                return d.filename() == a.filename();
            });
            if (it == dets.end())
                throw IoError("no detection file matching " + a.filename().string());
            images.push_back(eval::LabeledImage{wire::load_detections(it->string()).detections,
                                                wire::load_annotation(a.string()).elements});
        }
    }

    auto micro = [&](double t, bool masks) {
        eval::MatchOptions opt;
        opt.iou_thresh = t;
        opt.use_masks = masks;
        opt.include_recovered = include_recovered;
        long long tp = 0, fp = 0, n_gt = 0;
        for (const eval::LabeledImage& im : images) {
            eval::MatchResult m = eval::match_detections(im.preds, im.gts, opt);
            tp += m.tp;
            fp += m.fp;
            n_gt += m.num_gt;
        }
        double p = tp + fp ? 100.0 * tp / (tp + fp) : 100.0;
        double r = n_gt ? 100.0 * tp / n_gt : 100.0;
        return std::make_pair(p, r);
    };

    std::string j = "{\n  \"images\": " + std::to_string(images.size());
    char buf[256];
    for (bool masks : {false, true}) {
        auto [p50, r50] = micro(0.5, masks);
        auto [p75, r75] = micro(0.75, masks);
        double ap50 = eval::corpus_ap(images, 0.5, masks, include_recovered);
        double ap75 = eval::corpus_ap(images, 0.75, masks, include_recovered);
        double ap_r = eval::ap_range(images, masks, include_recovered);
        std::snprintf(buf, sizeof buf,
                      ",\n  \"%s\": {\"ap50\": %.6f, \"ap75\": %.6f, \"ap50_95\": %.6f, "
                      "\"p50\": %.4f, \"r50\": %.4f, \"p75\": %.4f, \"r75\": %.4f}",
                      masks ? "mask" : "bbox", ap50, ap75, ap_r, p50, r50, p75, r75);
        j += buf;
        std::snprintf(buf, sizeof buf,
                      "%-5s AP50 %.4f  AP75 %.4f  AP50:95 %.4f  P50 %.2f  R50 %.2f\n",
                      masks ? "mask" : "bbox", ap50, ap75, ap_r, p50, r50);
        std::cout << buf;
    }
    j += "\n}\n";
    if (out_path) wire::write_text_file(*out_path, j);
    return 0;
}

int cmd_pipeline(const Globals& g, const std::string& out_dir, std::optional<int> count,
                 std::optional<int> runs, const std::optional<std::string>& canvas,
                 std::optional<int> events) {
    fs::create_directories(out_dir);
    const int n = count.value_or(g.cfg.synth_count);
    synth::SpecConstraints c = constraints_from(g, canvas, events);
    std::vector<AnnotatedTimeline> corpus;
    corpus.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        corpus.push_back(synth_one(g.seed, i, c).tl);
        if (g.trace) std::cerr << "synth " << image_name(i) << "\n";
    }

    detsim::NoiseProfile noise = effective_noise(g);

    eval::GainConfig gc;
    gc.runs = runs.value_or(g.cfg.runs);
    gc.seed = derive_seed(g.seed, 0x9a17);
    gc.repair = g.cfg.repair;
    gc.grabcut = g.cfg.grabcut;
    gc.refine_masks = g.cfg.refine_masks;
    gc.jobs = g.jobs;
    eval::GainReport report = eval::gain_report(corpus, noise, gc);

    wire::write_text_file((fs::path(out_dir) / "gain_report.csv").string(),
                          eval::gain_csv(report));
    std::string table = eval::gain_table(report);
    wire::write_text_file((fs::path(out_dir) / "gain_report.txt").string(), table);
    std::cout << table;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"timeline-kit: synthetic timeline infographics, detection repair, "
                 "template extraction, re-rendering, evaluation"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--seed", g.seed, "base RNG seed (every derived stream is deterministic)");
    app.add_option("--config", g.config_path, "pipeline config JSON");
    app.add_flag("--trace", g.trace, "dump per-stage outputs / progress");
    app.add_option("--jobs", g.jobs, "worker threads for corpus evaluation")
        ->check(CLI::PositiveNumber);

    // synth-gen
    auto* sg = app.add_subcommand("synth-gen", "generate labeled synthetic timelines");
    sg->fallthrough();
    std::string sg_out = "out";
    int sg_count = 20;
    std::optional<std::string> sg_canvas;
    std::optional<int> sg_events;
    sg->add_option("--out", sg_out, "output directory")->required();
    sg->add_option("--count", sg_count, "number of timelines")->check(CLI::PositiveNumber);
    sg->add_option("--canvas", sg_canvas, "pin canvas size, WIDTHxHEIGHT");
    sg->add_option("--events", sg_events, "pin events per timeline")->check(CLI::PositiveNumber);

    // detect-sim
    auto* ds = app.add_subcommand("detect-sim", "simulate a noisy detector on annotations");
    ds->fallthrough();
    std::string ds_ann, ds_out;
    ds->add_option("--ann", ds_ann, "annotation file or directory")->required();
    ds->add_option("--out", ds_out, "detection output file or directory")->required();

    // reconstruct
    auto* rc = app.add_subcommand("reconstruct", "repair raw detections (dedup, vote, recover)");
    rc->fallthrough();
    std::string rc_dets, rc_out;
    rc->add_option("--dets", rc_dets, "detection file or directory")->required();
    rc->add_option("--out", rc_out, "repaired output file or directory")->required();

    // extract
    auto* ex = app.add_subcommand("extract", "build a template from an annotated bitmap");
    ex->fallthrough();
    std::string ex_ann, ex_out;
    std::optional<std::string> ex_dets;
    ex->add_option("--ann", ex_ann, "annotation file (bitmap resolved next to it)")->required();
    ex->add_option("--dets", ex_dets, "detections to extract from (default: the annotation)");
    ex->add_option("--out", ex_out, "template JSON path")->required();

    // render
    auto* rd = app.add_subcommand("render", "render new data through a template");
    rd->fallthrough();
    std::string rd_tpl, rd_data;
    std::optional<std::string> rd_png, rd_svg, rd_layout, rd_canvas, rd_scale, rd_src;
    bool rd_no_loop = false;
    rd->add_option("--template", rd_tpl, "template JSON")->required();
    rd->add_option("--data", rd_data, "event data JSON ({\"events\": [{time, label, icon?}]})")
        ->required();
    rd->add_option("--out-png", rd_png, "raster output path");
    rd->add_option("--out-svg", rd_svg, "vector output path");
    rd->add_option("--out-layout", rd_layout, "placed-element geometry JSON");
    rd->add_option("--canvas", rd_canvas, "override canvas, WIDTHxHEIGHT");
    rd->add_option("--scale", rd_scale,
                   "override scale: Chronological|Relative|Logarithmic|Sequential|SequentialInterim");
    rd->add_option("--rep-source", rd_src, "borrow event positions from this template");
    rd->add_flag("--no-loop", rd_no_loop, "fail instead of reusing slots when data outnumbers them");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "COCO-style AP / precision / recall");
    ev->fallthrough();
    std::string ev_ann, ev_dets;
    std::optional<std::string> ev_out;
    bool ev_recovered = false;
    ev->add_option("--ann", ev_ann, "annotation file or directory")->required();
    ev->add_option("--dets", ev_dets, "detection file or directory")->required();
    ev->add_option("--out", ev_out, "report JSON path");
    ev->add_flag("--recovered", ev_recovered, "include Recovered detections as predictions");

    // pipeline
    auto* pl = app.add_subcommand("pipeline", "synthesize a corpus and report per-stage gains");
    pl->fallthrough();
    std::string pl_out = "out";
    std::optional<int> pl_count, pl_runs, pl_events;
    std::optional<std::string> pl_canvas;
    pl->add_option("--out", pl_out, "output directory")->required();
    pl->add_option("--count", pl_count, "corpus size (default: config synth.count)")
        ->check(CLI::PositiveNumber);
    pl->add_option("--runs", pl_runs, "seeded repetitions to average (default: config eval.runs)")
        ->check(CLI::PositiveNumber);
    pl->add_option("--canvas", pl_canvas, "pin canvas size, WIDTHxHEIGHT");
    pl->add_option("--events", pl_events, "pin events per timeline")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!g.config_path.empty()) {
            g.cfg = config::load_config(g.config_path);
            g.have_config = true;
        }
        if (sg->parsed()) return cmd_synth_gen(g, sg_out, sg_count, sg_canvas, sg_events);
        if (ds->parsed()) return cmd_detect_sim(g, ds_ann, ds_out);
        if (rc->parsed()) return cmd_reconstruct(g, rc_dets, rc_out);
        if (ex->parsed()) return cmd_extract(g, ex_ann, ex_dets, ex_out);
        if (rd->parsed())
            return cmd_render(g, rd_tpl, rd_data, rd_png, rd_svg, rd_layout, rd_canvas, rd_scale,
                              rd_src, rd_no_loop);
        if (ev->parsed()) return cmd_evaluate(ev_ann, ev_dets, ev_out, ev_recovered);
        if (pl->parsed()) return cmd_pipeline(g, pl_out, pl_count, pl_runs, pl_canvas, pl_events);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
