#include "timelinekit/config.hpp"

#include <initializer_list>
#include <string>

#include "json_common.hpp"
#include "timelinekit/wire.hpp"

namespace timelinekit {
namespace config {

namespace {

using jsonio::json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw SchemaError(path + "." + it.key(), "unknown field");
    }
}

void opt_num(const json& obj, const char* key, const std::string& path, double* out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    *out = jsonio::need_number(*it, path + "." + key);
}

void opt_int(const json& obj, const char* key, const std::string& path, int* out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    *out = jsonio::need_int(*it, path + "." + key);
}

void opt_bool(const json& obj, const char* key, const std::string& path, bool* out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_boolean()) throw SchemaError(path + "." + key, "expected a boolean");
    *out = it->get<bool>();
}

void parse_noise(const json& j, detsim::NoiseProfile* n) {
    check_keys(j, "$.noise",
               {"duplicate_rate", "drop_rate", "misclassify_rate", "jitter_px", "mask_coarsen_px",
                "hallucination_rate", "score"});
    opt_num(j, "duplicate_rate", "$.noise", &n->duplicate_rate);
    opt_num(j, "drop_rate", "$.noise", &n->drop_rate);
    opt_num(j, "misclassify_rate", "$.noise", &n->misclassify_rate);
    opt_num(j, "jitter_px", "$.noise", &n->jitter_px);
    opt_num(j, "mask_coarsen_px", "$.noise", &n->mask_coarsen_px);
    opt_num(j, "hallucination_rate", "$.noise", &n->hallucination_rate);
    if (auto it = j.find("score"); it != j.end()) {
        check_keys(*it, "$.noise.score", {"mu_tp", "sigma_tp", "mu_fp", "sigma_fp"});
        opt_num(*it, "mu_tp", "$.noise.score", &n->score.mu_tp);
        opt_num(*it, "sigma_tp", "$.noise.score", &n->score.sigma_tp);
        opt_num(*it, "mu_fp", "$.noise.score", &n->score.mu_fp);
        opt_num(*it, "sigma_fp", "$.noise.score", &n->score.sigma_fp);
    }
}

void parse_repair(const json& j, reconstruct::RepairParams* p) {
    check_keys(j, "$.repair",
               {"nms_score_thresh", "nms_iou_thresh", "nmm_merge_thresh", "vote_aspect_tol",
                "vote_area_tol", "gap_factor", "recovered_score"});
    opt_num(j, "nms_score_thresh", "$.repair", &p->nms_score_thresh);
    opt_num(j, "nms_iou_thresh", "$.repair", &p->nms_iou_thresh);
    opt_num(j, "nmm_merge_thresh", "$.repair", &p->nmm_merge_thresh);
    opt_num(j, "vote_aspect_tol", "$.repair", &p->vote_aspect_tol);
    opt_num(j, "vote_area_tol", "$.repair", &p->vote_area_tol);
    opt_num(j, "gap_factor", "$.repair", &p->gap_factor);
    opt_num(j, "recovered_score", "$.repair", &p->recovered_score);
}

void parse_grabcut(const json& j, segment::GrabCutParams* p) {
    check_keys(j, "$.grabcut",
               {"gmm_components", "gamma", "max_iterations", "convergence_tol", "roi_margin",
                "mask_erode_px", "mask_context_px"});
    opt_int(j, "gmm_components", "$.grabcut", &p->gmm_components);
    opt_num(j, "gamma", "$.grabcut", &p->gamma);
    opt_int(j, "max_iterations", "$.grabcut", &p->max_iterations);
    opt_num(j, "convergence_tol", "$.grabcut", &p->convergence_tol);
    opt_int(j, "roi_margin", "$.grabcut", &p->roi_margin);
    opt_num(j, "mask_erode_px", "$.grabcut", &p->mask_erode_px);
    opt_num(j, "mask_context_px", "$.grabcut", &p->mask_context_px);
}

void parse_synth(const json& j, PipelineConfig* cfg) {
    check_keys(j, "$.synth", {"count", "canvas_width", "canvas_height", "n_events"});
    opt_int(j, "count", "$.synth", &cfg->synth_count);
    if (cfg->synth_count < 1) throw SchemaError("$.synth.count", "must be >= 1");
    int v = 0;
    if (auto it = j.find("canvas_width"); it != j.end()) {
        v = jsonio::need_int(*it, "$.synth.canvas_width");
        if (v < 1) throw SchemaError("$.synth.canvas_width", "must be >= 1");
        cfg->canvas_width = v;
    }
    if (auto it = j.find("canvas_height"); it != j.end()) {
        v = jsonio::need_int(*it, "$.synth.canvas_height");
        if (v < 1) throw SchemaError("$.synth.canvas_height", "must be >= 1");
        cfg->canvas_height = v;
    }
    if (auto it = j.find("n_events"); it != j.end()) {
        v = jsonio::need_int(*it, "$.synth.n_events");
        if (v < 1) throw SchemaError("$.synth.n_events", "must be >= 1");
        cfg->n_events = v;
    }
}

void parse_eval(const json& j, PipelineConfig* cfg) {
    check_keys(j, "$.eval", {"runs", "refine_masks"});
    opt_int(j, "runs", "$.eval", &cfg->runs);
    if (cfg->runs < 1) throw SchemaError("$.eval.runs", "must be >= 1");
    opt_bool(j, "refine_masks", "$.eval", &cfg->refine_masks);
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
    json j = jsonio::parse_or_throw(text);
    check_keys(j, "$", {"noise", "repair", "grabcut", "synth", "eval"});
    PipelineConfig cfg;
    if (auto it = j.find("noise"); it != j.end()) parse_noise(*it, &cfg.noise);
    if (auto it = j.find("repair"); it != j.end()) parse_repair(*it, &cfg.repair);
    if (auto it = j.find("grabcut"); it != j.end()) parse_grabcut(*it, &cfg.grabcut);
    if (auto it = j.find("synth"); it != j.end()) parse_synth(*it, &cfg);
    if (auto it = j.find("eval"); it != j.end()) parse_eval(*it, &cfg);
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    return parse_config(wire::read_text_file(path));
}

std::string config_json(const PipelineConfig& cfg) {
    json j;
    json& n = j["noise"];
    n["duplicate_rate"] = cfg.noise.duplicate_rate;
    n["drop_rate"] = cfg.noise.drop_rate;
    n["misclassify_rate"] = cfg.noise.misclassify_rate;
    n["jitter_px"] = cfg.noise.jitter_px;
    n["mask_coarsen_px"] = cfg.noise.mask_coarsen_px;
    n["hallucination_rate"] = cfg.noise.hallucination_rate;
    n["score"] = {{"mu_tp", cfg.noise.score.mu_tp},
                  {"sigma_tp", cfg.noise.score.sigma_tp},
                  {"mu_fp", cfg.noise.score.mu_fp},
                  {"sigma_fp", cfg.noise.score.sigma_fp}};
    json& r = j["repair"];
    r["nms_score_thresh"] = cfg.repair.nms_score_thresh;
    r["nms_iou_thresh"] = cfg.repair.nms_iou_thresh;
    r["nmm_merge_thresh"] = cfg.repair.nmm_merge_thresh;
    r["vote_aspect_tol"] = cfg.repair.vote_aspect_tol;
    r["vote_area_tol"] = cfg.repair.vote_area_tol;
    r["gap_factor"] = cfg.repair.gap_factor;
    r["recovered_score"] = cfg.repair.recovered_score;
    json& g = j["grabcut"];
    g["gmm_components"] = cfg.grabcut.gmm_components;
    g["gamma"] = cfg.grabcut.gamma;
    g["max_iterations"] = cfg.grabcut.max_iterations;
    g["convergence_tol"] = cfg.grabcut.convergence_tol;
    g["roi_margin"] = cfg.grabcut.roi_margin;
    g["mask_erode_px"] = cfg.grabcut.mask_erode_px;
    g["mask_context_px"] = cfg.grabcut.mask_context_px;
    json& s = j["synth"];
    s["count"] = cfg.synth_count;
    if (cfg.canvas_width) s["canvas_width"] = *cfg.canvas_width;
    if (cfg.canvas_height) s["canvas_height"] = *cfg.canvas_height;
    if (cfg.n_events) s["n_events"] = *cfg.n_events;
    json& e = j["eval"];
    e["runs"] = cfg.runs;
    e["refine_masks"] = cfg.refine_masks;
    return j.dump(2) + "\n";
}

}  // namespace config
}  // namespace timelinekit
