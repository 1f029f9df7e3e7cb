"""Timeline infographic toolkit.

Synthesizes labeled timeline bitmaps, simulates and repairs noisy detections,
extracts reusable templates, renders new data through them, and evaluates with
COCO-style metrics. Images cross the boundary as PNG bytes, structured data as
JSON strings (the same wire formats the CLI uses).
"""

from timelinekit._core import (
    TimelinekitError,
    default_config,
    evaluate,
    extract,
    generate,
    iou,
    render,
    repair,
    simulate,
)

__all__ = [
    "TimelinekitError",
    "default_config",
    "evaluate",
    "extract",
    "generate",
    "iou",
    "render",
    "repair",
    "simulate",
]
