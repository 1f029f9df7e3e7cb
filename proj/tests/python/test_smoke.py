"""End-to-end smoke of the python surface: every exported operation runs and
the pipeline's outputs stay consistent with each other."""

import json

import timelinekit as tk


def test_iou():
    assert tk.iou([0, 0, 10, 10], [0, 0, 10, 10]) == 1.0
    assert tk.iou([0, 0, 10, 10], [0, 10, 10, 10]) == 0.0
    # 5x10 overlap over 150 union
    assert abs(tk.iou([0, 0, 10, 10], [0, 5, 10, 10]) - 50.0 / 150.0) < 1e-12


def test_generate_is_deterministic():
    png_a, ann_a = tk.generate(7)
    png_b, ann_b = tk.generate(7)
    assert png_a == png_b
    assert ann_a == ann_b
    ann = json.loads(ann_a)
    assert ann["width"] > 0 and ann["height"] > 0
    assert ann["elements"] and ann["events"] and ann["data"]


def test_pipeline_roundtrip():
    png, ann_json = tk.generate(11)
    dets_json = tk.simulate(png, ann_json, seed=3)
    repaired_json = tk.repair(dets_json)

    report = tk.evaluate([ann_json], [repaired_json])
    assert 0.0 <= report["ap"] <= 1.0
    assert report["gt"] == len(json.loads(ann_json)["elements"])

    # repair of noise-free detections is the identity
    clean_json = tk.simulate(png, ann_json, seed=3, duplicate_rate=0, drop_rate=0,
                             misclassify_rate=0, jitter_px=0)
    clean_report = tk.evaluate([ann_json], [tk.repair(clean_json)])
    assert clean_report["precision"] == 1.0
    assert clean_report["recall"] == 1.0


def test_extract_and_render():
    png, ann_json = tk.generate(23)
    template_json = tk.extract(png, ann_json, refine_masks=False)
    doc = json.loads(template_json)
    assert doc["event_slots"]

    events = {"events": json.loads(ann_json)["data"]}
    svg, out_png, placed = tk.render(template_json, json.dumps(events))
    assert svg.startswith("<svg") and "</svg>" in svg
    assert out_png[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(placed) >= len(events["events"])

    # same template + same data -> same pixels
    svg2, out_png2, _ = tk.render(template_json, json.dumps(events))
    assert svg == svg2 and out_png == out_png2


def test_errors_surface():
    try:
        tk.render("{}", '{"events": []}')
    except tk.TimelinekitError:
        pass
    else:
        raise AssertionError("expected TimelinekitError for an invalid template")


def test_default_config_parses():
    cfg = json.loads(tk.default_config())
    assert cfg["eval"]["runs"] == 5
    assert cfg["grabcut"]["gmm_components"] == 5


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"{name}: ok")
