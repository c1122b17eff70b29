"""Predicate models: one small HMM per lexical predicate.

Each predicate is scored against detection tracks by a hidden Markov
model with at most four states.  Observation scores are soft penalties:
a satisfied state condition contributes exactly 0, a violated one a
negative margin-scaled log-likelihood with a finite floor (or -inf in
hard mode).  Class and color predicates pass the detector's log-odds
through unchanged, so confidently-satisfied atoms score positive.

Observations are computed as vectorized tables over a packed feature
representation of the trace (``pack_features``); the scalar ``observe``
entry point runs the same code on a single-detection pack, so there is
exactly one definition of every predicate's semantics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .logic import (CLASS_PREDICATES, COLOR_PREDICATES, NEQ,
                    SPATIAL_PREDICATES, VERB_PREDICATES)
from .perception import CLASSES, COLORS, Detection, FRAME_WIDTH

__all__ = ["HMMConfig", "PredicateHMM", "PredicateLibrary", "build_library",
           "pack_features", "FeaturePack", "mirror_detection", "MIRROR_PAIRS"]

NEG_INF = float("-inf")

# predicates that swap under a left/right reflection of the frame
MIRROR_PAIRS = {"left_of": "right_of", "right_of": "left_of"}


@dataclass(frozen=True)
class HMMConfig:
    near: float = 140.0          # px: interaction distance
    far_radius: float = 280.0    # px: where an approach starts / a leave ends
    with_radius: float = 150.0   # px: accompaniment distance
    speed_still: float = 1.2     # px/frame: below this is stationary
    speed_move: float = 2.2      # px/frame: above this is displacing
    vel_eps: float = 1.0         # px/frame: closing/receding/lift rate
    gaze_cos: float = 0.966      # cos 15 deg gaze tolerance
    lateral_margin: float = 10.0
    on_gap: float = 18.0         # px: vertical contact tolerance
    on_overlap: float = 0.5      # fraction of the narrower box
    iou_neq: float = 0.2         # boxes overlapping more are "the same"
    tau_dist: float = 20.0
    tau_speed: float = 1.0
    tau_cos: float = 0.15
    floor: float = -25.0         # per-frame penalty floor (soft mode)
    hard: bool = False


_LOG_HALF = math.log(0.5)

# staying put in a multi-successor state is cheap: the score difference
# between readings should come from observations, not from how long a
# path lingers before advancing
SELF_LOOP = 0.99


# ---------------------------------------------------------------------------
# packed trace features


@dataclass
class FeaturePack:
    """Padded per-frame detection features plus pairwise geometry.

    Detections beyond a frame's count are padding: ``valid`` is False and
    ``conf`` is -inf there, which keeps them out of every optimal path.
    """
    valid: np.ndarray          # [T, D] bool
    center: np.ndarray         # [T, D, 2]
    velocity: np.ndarray       # [T, D, 2]
    speed: np.ndarray          # [T, D]
    heading: np.ndarray        # [T, D, 2], NaN when absent
    box: np.ndarray            # [T, D, 4]
    class_scores: np.ndarray   # [T, D, len(CLASSES)]
    color_scores: np.ndarray   # [T, D, len(COLORS)]
    conf: np.ndarray           # [T, D], max class score, -inf on padding
    dist: np.ndarray           # [T, D, D] center distance a->b
    ddot: np.ndarray           # [T, D, D] d/dt of dist (+ = separating)
    adot: np.ndarray           # [T, D, D] velocity(a) . unit(b-a), + = a toward b
    iou: np.ndarray            # [T, D, D]
    gaze_dot: np.ndarray       # [T, D, D] heading(a) . unit(b-a), NaN w/o heading

    @property
    def num_frames(self) -> int:
        return self.valid.shape[0]

    @property
    def max_detections(self) -> int:
        return self.valid.shape[1]


def pack_features(frames: list[list[Detection]]) -> FeaturePack:
    T = len(frames)
    D = max(len(f) for f in frames)
    valid = np.zeros((T, D), dtype=bool)
    center = np.zeros((T, D, 2))
    velocity = np.zeros((T, D, 2))
    heading = np.full((T, D, 2), np.nan)
    box = np.zeros((T, D, 4))
    class_scores = np.full((T, D, len(CLASSES)), NEG_INF)
    color_scores = np.full((T, D, len(COLORS)), NEG_INF)
    for t, frame in enumerate(frames):
        for i, d in enumerate(frame):
            valid[t, i] = True
            center[t, i] = d.center
            velocity[t, i] = d.velocity
            box[t, i] = d.box
            if d.heading is not None:
                heading[t, i] = d.heading
            class_scores[t, i] = [d.class_scores.get(c, NEG_INF) for c in CLASSES]
            color_scores[t, i] = [d.color_scores.get(c, NEG_INF) for c in COLORS]
    speed = np.hypot(velocity[..., 0], velocity[..., 1])
    conf = np.where(valid, class_scores.max(axis=2), NEG_INF)

    delta = center[:, None, :, :] - center[:, :, None, :]   # [T, a, b, 2]
    dist = np.hypot(delta[..., 0], delta[..., 1])
    rvel = velocity[:, None, :, :] - velocity[:, :, None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        ddot = np.where(dist > 1e-6,
                        (delta * rvel).sum(axis=-1) / np.maximum(dist, 1e-6),
                        0.0)
        unit = delta / np.maximum(dist, 1e-6)[..., None]
    adot = np.where(dist > 1e-6,
                    (velocity[:, :, None, :] * unit).sum(axis=-1), 0.0)
    gaze = (heading[:, :, None, :] * unit).sum(axis=-1)
    gaze = np.where(dist > 1e-6, gaze, 1.0)
    # keep NaN where the would-be gazer has no heading
    gaze = np.where(np.isnan(heading[:, :, None, 0]), np.nan, gaze)

    x1 = np.maximum(box[:, :, None, 0], box[:, None, :, 0])
    y1 = np.maximum(box[:, :, None, 1], box[:, None, :, 1])
    x2 = np.minimum(box[:, :, None, 2], box[:, None, :, 2])
    y2 = np.minimum(box[:, :, None, 3], box[:, None, :, 3])
    inter = np.clip(x2 - x1, 0, None) * np.clip(y2 - y1, 0, None)
    area = (box[..., 2] - box[..., 0]) * (box[..., 3] - box[..., 1])
    union = area[:, :, None] + area[:, None, :] - inter
    iou = np.where(union > 0, inter / np.maximum(union, 1e-9), 0.0)

    return FeaturePack(valid, center, velocity, speed, heading, box,
                       class_scores, color_scores, conf, dist, ddot, adot,
                       iou, gaze)


# ---------------------------------------------------------------------------
# margin scoring


def _soft(margin: np.ndarray, cfg: HMMConfig) -> np.ndarray:
    """min(0, log sigmoid(margin) - log sigmoid(0)), floored; -inf hard."""
    m = np.asarray(margin, dtype=float)
    if cfg.hard:
        return np.where(m >= 0.0, 0.0, NEG_INF)
    score = -np.logaddexp(0.0, -m) - _LOG_HALF
    return np.maximum(cfg.floor, np.minimum(0.0, score))


# per-state condition builders; each returns [T, D] or [T, D, D]

def _near(cfg, fp, radius=None):
    r = cfg.near if radius is None else radius
    return _soft((r - fp.dist) / cfg.tau_dist, cfg)


def _still(cfg, fp):
    return _soft((cfg.speed_still - fp.speed) / cfg.tau_speed, cfg)


def _displacing(cfg, fp):
    return _soft((fp.speed - cfg.speed_move) / cfg.tau_speed, cfg)


def _far(cfg, fp):
    return _soft((fp.dist - cfg.far_radius) / cfg.tau_dist, cfg)


def _closing(cfg, fp):
    # directed: the agent itself must be advancing on the patient, so a
    # stationary entity cannot count as approaching something that walks up
    return _soft((fp.adot - cfg.vel_eps) / cfg.tau_speed, cfg)


def _receding(cfg, fp):
    return _soft((-fp.adot - cfg.vel_eps) / cfg.tau_speed, cfg)


def _rising(cfg, fp):
    return _soft((-fp.velocity[..., 1] - cfg.vel_eps) / cfg.tau_speed, cfg)


def _descending(cfg, fp):
    return _soft((fp.velocity[..., 1] - cfg.vel_eps) / cfg.tau_speed, cfg)


def _aligned(cfg, fp):
    miss = NEG_INF if cfg.hard else cfg.floor
    with np.errstate(invalid="ignore"):
        score = _soft((fp.gaze_dot - cfg.gaze_cos) / cfg.tau_cos, cfg)
    return np.where(np.isnan(fp.gaze_dot), miss, score)


def _b(table):
    """Broadcast a patient-only [T, D] table over the agent axis."""
    return table[:, None, :]


def _a(table):
    return table[:, :, None]


@dataclass(frozen=True)
class PredicateHMM:
    """A predicate as states + allowed transitions + observation tables.

    ``tables(cfg, pack)`` returns the observation scores for every state
    and detection (tuple): unary predicates yield [T, D] per state,
    binary ones [T, D_agent, D_patient].  Transition log probabilities
    are uniform over each state's allowed successors, so every row of
    exp(log_transition) sums to one over the allowed entries.  Paths
    must start in an initial state and end in an accepting state.
    """
    name: str
    arity: int
    states: tuple[str, ...]
    tables: object = field(hash=False, compare=False)
    successors: tuple[tuple[int, ...], ...] = ((0,),)
    initial: tuple[int, ...] = (0,)
    accepting: tuple[int, ...] = (0,)

    def __post_init__(self):
        n = len(self.states)
        if not 1 <= n <= 4:
            raise ValueError(f"{self.name}: needs 1..4 states, has {n}")
        if len(self.successors) != n:
            raise ValueError(f"{self.name}: one successor set per state")
        for succ in self.successors:
            if not succ:
                raise ValueError(f"{self.name}: every state needs a successor")

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def log_transition(self) -> np.ndarray:
        n = len(self.states)
        m = np.full((n, n), NEG_INF)
        for k, succ in enumerate(self.successors):
            if len(succ) == 1:
                m[k, succ[0]] = 0.0
            elif k in succ:
                m[k, k] = math.log(SELF_LOOP)
                rest = math.log((1.0 - SELF_LOOP) / (len(succ) - 1))
                for s in succ:
                    if s != k:
                        m[k, s] = rest
            else:
                m[k, list(succ)] = -math.log(len(succ))
        return m

    def observation_tables(self, cfg: HMMConfig, pack: FeaturePack):
        """Per-state score arrays, stacked: [T, S, D] or [T, S, D, D]."""
        return np.stack(self.tables(cfg, pack), axis=1)

    def observe(self, cfg: HMMConfig, state: int, *dets: Detection) -> float:
        if len(dets) != self.arity:
            raise ValueError(f"{self.name}: expected {self.arity} arguments")
        if self.arity == 1:
            pack = pack_features([[dets[0]]])
            return float(self.tables(cfg, pack)[state][0, 0])
        pack = pack_features([list(dets)])
        return float(self.tables(cfg, pack)[state][0, 0, 1])


def _build_verb(name: str) -> PredicateHMM:
    if name == "pick_up":
        def tables(cfg, fp):
            return [_near(cfg, fp) + _b(_still(cfg, fp)),
                    _near(cfg, fp) + _b(_rising(cfg, fp))]
        return PredicateHMM(name, 2, ("pre", "rise"), tables,
                            ((0, 1), (1,)), initial=(0,), accepting=(1,))
    if name == "put_down":
        def tables(cfg, fp):
            return [_near(cfg, fp) + _b(_still(cfg, fp)),
                    _near(cfg, fp) + _b(_descending(cfg, fp)),
                    np.broadcast_to(_b(_still(cfg, fp)), fp.dist.shape).copy()]
        return PredicateHMM(name, 2, ("pre", "descend", "rest"), tables,
                            ((0, 1), (1, 2), (2,)), initial=(0,), accepting=(2,))
    if name == "hold":
        def tables(cfg, fp):
            return [_near(cfg, fp) + _a(_still(cfg, fp)) + _b(_still(cfg, fp))]
        return PredicateHMM(name, 2, ("hold",), tables)
    if name == "move":
        def tables(cfg, fp):
            still = np.broadcast_to(_b(_still(cfg, fp)), fp.dist.shape).copy()
            return [still,
                    _near(cfg, fp) + _b(_displacing(cfg, fp)),
                    still]
        return PredicateHMM(name, 2, ("pre", "carry", "post"), tables,
                            ((0, 1), (1, 2), (2,)),
                            initial=(0, 1), accepting=(1, 2))
    if name == "look_at":
        def tables(cfg, fp):
            return [_aligned(cfg, fp)]
        return PredicateHMM(name, 2, ("aligned",), tables)
    if name == "approach":
        # the pair must start out genuinely separated, close in, and end
        # near; pairs that sit near throughout cannot fake the far phase
        def tables(cfg, fp):
            return [_far(cfg, fp), _closing(cfg, fp), _near(cfg, fp)]
        return PredicateHMM(name, 2, ("far", "closing", "near"), tables,
                            ((0, 1), (1, 2), (2,)), initial=(0,),
                            accepting=(2,))
    if name == "leave":
        def tables(cfg, fp):
            return [_near(cfg, fp), _receding(cfg, fp), _far(cfg, fp)]
        return PredicateHMM(name, 2, ("near", "receding", "far"), tables,
                            ((0, 1), (1, 2), (2,)), initial=(0,),
                            accepting=(2,))
    raise ValueError(f"unknown verb predicate {name!r}")


def _build_spatial(name: str) -> PredicateHMM:
    if name == "with":
        def tables(cfg, fp):
            return [_near(cfg, fp, radius=cfg.with_radius)]
    elif name in ("left_of", "right_of"):
        sign = 1.0 if name == "left_of" else -1.0

        def tables(cfg, fp, sign=sign):
            gap = sign * (fp.center[:, None, :, 0] - fp.center[:, :, None, 0])
            return [_soft((gap - cfg.lateral_margin) / cfg.tau_dist, cfg)]
    elif name == "on":
        def tables(cfg, fp):
            gap = np.abs(fp.box[:, :, None, 3] - fp.box[:, None, :, 1])
            contact = _soft((cfg.on_gap - gap) / cfg.tau_dist, cfg)
            x1 = np.maximum(fp.box[:, :, None, 0], fp.box[:, None, :, 0])
            x2 = np.minimum(fp.box[:, :, None, 2], fp.box[:, None, :, 2])
            width = fp.box[..., 2] - fp.box[..., 0]
            want = cfg.on_overlap * np.minimum(width[:, :, None],
                                               width[:, None, :])
            overlap = _soft(((x2 - x1) - want) / cfg.tau_dist, cfg)
            return [contact + overlap]
    else:
        raise ValueError(f"unknown spatial predicate {name!r}")
    return PredicateHMM(name, 2, (name,), tables)


def _build_neq() -> PredicateHMM:
    def tables(cfg, fp):
        if cfg.hard:
            return [np.where(fp.iou <= cfg.iou_neq, 0.0, NEG_INF)]
        ramp = cfg.floor * (fp.iou - cfg.iou_neq) / (1.0 - cfg.iou_neq)
        return [np.where(fp.iou <= cfg.iou_neq, 0.0, np.maximum(cfg.floor, ramp))]
    return PredicateHMM(NEQ, 2, (NEQ,), tables)


def _build_class(name: str) -> PredicateHMM:
    idx = CLASSES.index(name)

    def tables(cfg, fp, idx=idx):
        return [fp.class_scores[:, :, idx]]
    return PredicateHMM(name, 1, (name,), tables)


def _build_color(name: str) -> PredicateHMM:
    idx = COLORS.index(name)

    def tables(cfg, fp, idx=idx):
        return [fp.color_scores[:, :, idx]]
    return PredicateHMM(name, 1, (name,), tables)


@dataclass(frozen=True)
class PredicateLibrary:
    config: HMMConfig
    models: dict = field(hash=False, compare=False)

    def get(self, name: str) -> PredicateHMM:
        try:
            return self.models[name]
        except KeyError:
            raise KeyError(f"no predicate model for {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.models

    def names(self) -> list[str]:
        return sorted(self.models)

    def observe(self, name: str, state: int, *dets: Detection) -> float:
        return self.get(name).observe(self.config, state, *dets)

    def observation_tables(self, name: str, pack: FeaturePack) -> np.ndarray:
        return self.get(name).observation_tables(self.config, pack)


def build_library(config: HMMConfig | None = None) -> PredicateLibrary:
    cfg = config or HMMConfig()
    models = {}
    for name in VERB_PREDICATES:
        models[name] = _build_verb(name)
    for name in SPATIAL_PREDICATES:
        models[name] = _build_spatial(name)
    for name in CLASS_PREDICATES:
        models[name] = _build_class(name)
    for name in COLOR_PREDICATES:
        models[name] = _build_color(name)
    models[NEQ] = _build_neq()
    return PredicateLibrary(cfg, models)


def mirror_detection(d: Detection, width: float = FRAME_WIDTH) -> Detection:
    """The same detection seen in a left/right-reflected frame."""
    x1, y1, x2, y2 = d.box
    heading = None
    if d.heading is not None:
        heading = (-d.heading[0], d.heading[1])
    return replace(d, box=(width - x2, y1, width - x1, y2),
                   velocity=(-d.velocity[0], d.velocity[1]),
                   heading=heading)
