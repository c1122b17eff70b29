"""Synthetic perception: renders scene scripts into detection streams.

No pixels are produced.  A simulated detector emits, per frame, a list of
detections with noisy boxes, per-class and per-color log-odds scores and
a velocity feature (the stand-in for optical flow).  Persons additionally
carry a heading unit vector.  The output format is what the recognition
and inference layers consume, and is serializable as JSON lines.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

__all__ = [
    "FRAME_WIDTH", "FRAME_HEIGHT", "BOX_SIZES", "CLASSES", "COLORS",
    "Detection", "VideoTrace", "NoiseModel", "TraceError",
    "motion_coherence", "simulate", "save_trace", "load_trace",
]

FRAME_WIDTH = 1280
FRAME_HEIGHT = 720          # y grows downward
FPS = 30

CLASSES = ("person", "chair", "bag", "telescope")
COLORS = ("green", "yellow")

# box (width, height) per class, centred on the entity position
BOX_SIZES = {
    "person": (56.0, 150.0),
    "chair": (76.0, 92.0),
    "bag": (40.0, 42.0),
    "telescope": (48.0, 22.0),
}

# detector log-odds for a confident hit / a confident rejection
SCORE_HIT = 1.8
SCORE_MISS = -2.8

TRACE_SCHEMA = "trace-v1"


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class Detection:
    box: tuple[float, float, float, float]        # x1, y1, x2, y2
    class_scores: dict[str, float] = field(hash=False)
    color_scores: dict[str, float] = field(hash=False)
    velocity: tuple[float, float] = (0.0, 0.0)
    heading: tuple[float, float] | None = None    # unit vector, persons only

    @property
    def confidence(self) -> float:
        return max(self.class_scores.values())

    @property
    def center(self) -> tuple[float, float]:
        x1, y1, x2, y2 = self.box
        return ((x1 + x2) / 2.0, (y1 + y2) / 2.0)

    def to_dict(self) -> dict:
        d = {"box": [round(v, 3) for v in self.box],
             "class_scores": {k: round(v, 5) for k, v in self.class_scores.items()},
             "color_scores": {k: round(v, 5) for k, v in self.color_scores.items()},
             "velocity": [round(v, 4) for v in self.velocity]}
        if self.heading is not None:
            d["heading"] = [round(v, 5) for v in self.heading]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Detection":
        return cls(box=tuple(d["box"]),
                   class_scores=dict(d["class_scores"]),
                   color_scores=dict(d["color_scores"]),
                   velocity=tuple(d.get("velocity", (0.0, 0.0))),
                   heading=tuple(d["heading"]) if d.get("heading") else None)


@dataclass
class VideoTrace:
    id: str
    frames: list[list[Detection]]
    width: int = FRAME_WIDTH
    height: int = FRAME_HEIGHT
    fps: int = FPS
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.frames) < 2:
            raise TraceError(f"{self.id}: a trace needs at least two frames")
        for t, frame in enumerate(self.frames):
            if not frame:
                raise TraceError(f"{self.id}: frame {t} has no detections")

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class NoiseModel:
    """Detector corruption knobs.

    jitter_sigma   pixel noise on box corners and velocity
    miss_rate      probability a true detection is dropped
    fp_rate        expected spurious detections per frame
    confusion      score noise scale on class/color log-odds
    """
    jitter_sigma: float = 0.0
    miss_rate: float = 0.0
    fp_rate: float = 0.0
    confusion: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.miss_rate < 1.0:
            raise ValueError("miss_rate must be in [0, 1)")
        if min(self.jitter_sigma, self.fp_rate, self.confusion) < 0:
            raise ValueError("noise parameters must be non-negative")


def motion_coherence(prev: Detection, cur: Detection,
                     bandwidth: float = 40.0) -> float:
    """Log score for ``cur`` continuing the track of ``prev``: penalizes
    the gap between the observed displacement and ``prev``'s velocity."""
    (px, py), (cx, cy) = prev.center, cur.center
    dx = (cx - px) - prev.velocity[0]
    dy = (cy - py) - prev.velocity[1]
    return -(dx * dx + dy * dy) / (bandwidth * bandwidth)


# ---------------------------------------------------------------------------
# simulation


def _rng_for(seed: int, script_id: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(script_id.encode())])


def _scores(rng, true_value: str | None, vocabulary, confusion: float):
    out = {}
    for v in vocabulary:
        base = SCORE_HIT if v == true_value else SCORE_MISS
        if confusion > 0:
            base += float(rng.normal(0.0, confusion))
        out[v] = base
    return out


def _heading(entity, positions, t, prev_heading):
    if entity.gaze is not None:
        tx, ty = positions[entity.gaze][t]
        x, y = positions[entity.name][t]
        dx, dy = tx - x, ty - y
    else:
        x, y = positions[entity.name][t]
        px, py = positions[entity.name][t - 1] if t else positions[entity.name][1]
        dx, dy = (x - px, y - py) if t else (px - x, py - y)
    norm = math.hypot(dx, dy)
    if norm < 1e-6:
        return prev_heading
    return (dx / norm, dy / norm)


def simulate(script, noise: NoiseModel | None = None, seed: int = 0,
             num_frames: int | None = None) -> VideoTrace:
    """Render a scene script into a detection trace.

    Deterministic given (script, noise, seed).  Frame count is drawn from
    the empirical clip-length distribution unless ``num_frames`` is given.
    Every frame keeps at least one detection even under heavy miss rates.
    """
    noise = noise or NoiseModel()
    rng = _rng_for(seed, script.id)
    if num_frames is None:
        num_frames = int(round(rng.normal(90.78, 6.0)))
        num_frames = max(60, min(120, num_frames))
    if num_frames < 2:
        raise TraceError("num_frames must be at least 2")

    # ground-truth centres per entity per frame
    positions = {e.name: [script.position(e.name, t / (num_frames - 1))
                          for t in range(num_frames)]
                 for e in script.entities}

    frames: list[list[Detection]] = []
    headings = {e.name: getattr(e, "facing", None) or (1.0, 0.0)
                for e in script.entities}
    for t in range(num_frames):
        frame: list[Detection] = []
        for e in script.entities:
            x, y = positions[e.name][t]
            if t == 0:
                nx, ny = positions[e.name][1]
                vx, vy = nx - x, ny - y
            else:
                px, py = positions[e.name][t - 1]
                vx, vy = x - px, y - py
            heading = None
            if e.cls == "person":
                headings[e.name] = _heading(e, positions, t, headings[e.name])
                heading = headings[e.name]
            if noise.miss_rate > 0 and rng.random() < noise.miss_rate:
                continue
            w, h = BOX_SIZES[e.cls]
            box = np.array([x - w / 2, y - h / 2, x + w / 2, y + h / 2])
            if noise.jitter_sigma > 0:
                box = box + rng.normal(0.0, noise.jitter_sigma, size=4)
                vx += float(rng.normal(0.0, noise.jitter_sigma / 2))
                vy += float(rng.normal(0.0, noise.jitter_sigma / 2))
            frame.append(Detection(
                box=tuple(float(v) for v in box),
                class_scores=_scores(rng, e.cls, CLASSES, noise.confusion),
                color_scores=_scores(rng, e.color, COLORS, noise.confusion),
                velocity=(vx, vy),
                heading=heading))
        if noise.fp_rate > 0:
            for _ in range(int(rng.poisson(noise.fp_rate))):
                cx = float(rng.uniform(60, FRAME_WIDTH - 60))
                cy = float(rng.uniform(60, FRAME_HEIGHT - 60))
                w, h = float(rng.uniform(30, 120)), float(rng.uniform(30, 160))
                scores = {c: SCORE_MISS + float(rng.normal(0.0, 1.0))
                          for c in CLASSES}
                colors = {c: SCORE_MISS + float(rng.normal(0.0, 1.0))
                          for c in COLORS}
                frame.append(Detection(
                    box=(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2),
                    class_scores=scores, color_scores=colors,
                    velocity=(float(rng.normal(0, 2)), float(rng.normal(0, 2)))))
        if not frame:
            # resurrect one true detection so the frame is never empty
            e = script.entities[int(rng.integers(len(script.entities)))]
            x, y = positions[e.name][t]
            w, h = BOX_SIZES[e.cls]
            frame.append(Detection(
                box=(x - w / 2, y - h / 2, x + w / 2, y + h / 2),
                class_scores=_scores(rng, e.cls, CLASSES, noise.confusion),
                color_scores=_scores(rng, e.color, COLORS, noise.confusion),
                velocity=(0.0, 0.0),
                heading=headings[e.name] if e.cls == "person" else None))
        frames.append(frame)

    metadata = dict(script.metadata)
    metadata["seed"] = seed
    return VideoTrace(id=script.id, frames=frames, metadata=metadata)


# ---------------------------------------------------------------------------
# serialization (JSON lines: one header line, then one line per frame)


def save_trace(trace: VideoTrace, path) -> None:
    lines = [json.dumps({
        "schema": TRACE_SCHEMA, "id": trace.id, "width": trace.width,
        "height": trace.height, "fps": trace.fps,
        "num_frames": len(trace.frames), "metadata": trace.metadata,
    })]
    for t, frame in enumerate(trace.frames):
        lines.append(json.dumps(
            {"t": t, "detections": [d.to_dict() for d in frame]}))
    Path(path).write_text("\n".join(lines) + "\n")


def load_trace(path) -> VideoTrace:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise TraceError("empty trace file")
    header = json.loads(lines[0])
    if header.get("schema") != TRACE_SCHEMA:
        raise TraceError(f"unsupported trace schema {header.get('schema')!r}")
    frames = []
    for t, ln in enumerate(lines[1:]):
        raw = json.loads(ln)
        if raw.get("t") != t:
            raise TraceError(f"frame index mismatch at line {t + 2}")
        frames.append([Detection.from_dict(d) for d in raw["detections"]])
    if header.get("num_frames") not in (None, len(frames)):
        raise TraceError("header frame count disagrees with body")
    return VideoTrace(id=header["id"], frames=frames,
                      width=header.get("width", FRAME_WIDTH),
                      height=header.get("height", FRAME_HEIGHT),
                      fps=header.get("fps", FPS),
                      metadata=header.get("metadata", {}))
