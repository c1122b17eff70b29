"""Scene scripts: ground-truth choreography for each interpretation.

``script_for(record, i)`` lays out a scene in which interpretation ``i``
of the sentence is what actually happens, and the competing readings are
visibly violated (wrong spatial relation, wrong actor, wrong color,
missing second object, and so on).  Scripts are pure geometry — entity
tracks as piecewise-linear keyframes — and are rendered to detection
traces by :func:`disambig.perception.simulate`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .logic import Atom, COLOR_PREDICATES, Const, OBJECT_SORT, VERB_PREDICATES
from .perception import FRAME_WIDTH

__all__ = ["EntityTrack", "SceneScript", "SceneError", "script_for",
           "generate_suite"]


class SceneError(ValueError):
    pass


@dataclass(frozen=True)
class EntityTrack:
    name: str
    cls: str                       # person | chair | bag | telescope
    color: str | None = None
    keyframes: tuple = ()          # ((frac, x, y), ...), frac ascending
    gaze: str | None = None        # persons: entity to face; None = heading
                                   # follows the walk direction
    facing: tuple | None = None    # resting heading when idle with no gaze

    def __post_init__(self):
        if len(self.keyframes) < 1:
            raise SceneError(f"{self.name}: needs at least one keyframe")
        fracs = [k[0] for k in self.keyframes]
        if fracs != sorted(fracs):
            raise SceneError(f"{self.name}: keyframes out of order")


@dataclass(frozen=True)
class SceneScript:
    id: str
    entities: tuple[EntityTrack, ...]
    metadata: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        names = [e.name for e in self.entities]
        if len(set(names)) != len(names):
            raise SceneError(f"{self.id}: duplicate entity names")

    def entity(self, name: str) -> EntityTrack:
        for e in self.entities:
            if e.name == name:
                return e
        raise SceneError(f"{self.id}: no entity {name!r}")

    def position(self, name: str, frac: float) -> tuple[float, float]:
        kf = self.entity(name).keyframes
        if frac <= kf[0][0]:
            return (kf[0][1], kf[0][2])
        for (f0, x0, y0), (f1, x1, y1) in zip(kf, kf[1:]):
            if frac <= f1:
                w = (frac - f0) / (f1 - f0)
                return (x0 + w * (x1 - x0), y0 + w * (y1 - y0))
        return (kf[-1][1], kf[-1][2])

    def mirrored(self) -> "SceneScript":
        flipped = tuple(
            EntityTrack(e.name, e.cls, e.color,
                        tuple((f, FRAME_WIDTH - x, y) for f, x, y in e.keyframes),
                        e.gaze,
                        (-e.facing[0], e.facing[1]) if e.facing else None)
            for e in self.entities)
        meta = dict(self.metadata)
        meta["mirrored"] = True
        return SceneScript(self.id + "-m", flipped, meta)


# ---------------------------------------------------------------------------
# layout constants (pixels; 1280x720, y grows downward)

PERSON_Y = 460
OBJECT_Y = 505
HELD_DX = 58          # held object sits this far from the holder
RISE_Y = 375          # height a picked-up object is lifted to
STOP_DIST = 112       # where an approaching person halts (inside "near")
FAR = 400             # comfortably outside every interaction radius


def _static(name, cls, color, x, y, gaze=None, facing=None):
    return EntityTrack(name, cls, color, ((0.0, x, y),), gaze, facing)


def _walk(name, x0, x1, y, t0=0.0, t1=0.75, gaze=None, cls="person"):
    kf = []
    if t0 > 0:
        kf.append((0.0, x0, y))
    kf.append((t0, x0, y))
    kf.append((t1, x1, y))
    if t1 < 1.0:
        kf.append((1.0, x1, y))
    return EntityTrack(name, cls, None, tuple(kf), gaze)


def _rise(name, cls, color, x):
    kf = ((0.0, x, OBJECT_Y), (0.35, x, OBJECT_Y),
          (0.65, x, RISE_Y), (1.0, x, RISE_Y))
    return EntityTrack(name, cls, color, kf)


def _fall(name, cls, color, x):
    kf = ((0.0, x, RISE_Y), (0.35, x, RISE_Y),
          (0.65, x, OBJECT_Y), (1.0, x, OBJECT_Y))
    return EntityTrack(name, cls, color, kf)


def _carried(name, cls, color, carrier: EntityTrack, dx, dy=42):
    kf = tuple((f, x + dx, y + dy) for f, x, y in carrier.keyframes)
    return EntityTrack(name, cls, color, kf)


def _perform(verb, agent, objects, px, walk=340):
    """Tracks for ``agent`` doing ``verb`` to ``objects`` around x = px.

    ``objects`` is a list of (name, cls, color).  Supports one or two
    objects for the stationary verbs and exactly one for approach/leave.
    """
    if verb in ("approach", "leave") and len(objects) != 1:
        raise SceneError(f"{verb} choreography expects one object")
    slots = [HELD_DX] if len(objects) == 1 else [-HELD_DX, HELD_DX]

    if verb == "hold":
        tracks = [_static(agent, "person", None, px, PERSON_Y)]
        for (name, cls, color), dx in zip(objects, slots):
            tracks.append(_static(name, cls, color, px + dx, OBJECT_Y))
        return tracks
    if verb == "pick_up":
        tracks = [_static(agent, "person", None, px, PERSON_Y)]
        for (name, cls, color), dx in zip(objects, slots):
            tracks.append(_rise(name, cls, color, px + dx))
        return tracks
    if verb == "put_down":
        tracks = [_static(agent, "person", None, px, PERSON_Y)]
        for (name, cls, color), dx in zip(objects, slots):
            tracks.append(_fall(name, cls, color, px + dx))
        return tracks
    if verb == "move":
        walker = _walk(agent, px, px + walk, PERSON_Y, t0=0.2, t1=0.8)
        tracks = [walker]
        for (name, cls, color), dx in zip(objects, slots):
            tracks.append(_carried(name, cls, color, walker, dx))
        return tracks
    if verb == "look_at":
        # objects sit down-range of the gaze, roughly collinear
        tracks = [_static(agent, "person", None, px, PERSON_Y,
                          gaze=objects[0][0])]
        for n, (name, cls, color) in enumerate(objects):
            tracks.append(_static(name, cls, color,
                                  px + 260 + 260 * n, OBJECT_Y + 8 * n))
        return tracks
    if verb == "approach":
        name, cls, color = objects[0]
        ox = px + STOP_DIST + FAR
        return [_walk(agent, px, px + FAR, PERSON_Y),
                _static(name, cls, color, ox, OBJECT_Y)]
    if verb == "leave":
        name, cls, color = objects[0]
        return [_walk(agent, px, px - FAR, PERSON_Y, t0=0.2, t1=1.0),
                _static(name, cls, color, px + STOP_DIST, OBJECT_Y)]
    raise SceneError(f"no choreography for verb {verb!r}")


# ---------------------------------------------------------------------------
# formula introspection: recover roles from the interpretation being staged


def _atoms(formula):
    return list(formula.atoms())


def _class_of(formula):
    """variable/constant term -> object class (unary non-color atoms)."""
    out = {}
    for a in _atoms(formula):
        if len(a.args) == 1 and a.predicate not in COLOR_PREDICATES:
            out[a.args[0]] = a.predicate
    return out


def _color_of(formula):
    return {a.args[0]: a.predicate for a in _atoms(formula)
            if len(a.args) == 1 and a.predicate in COLOR_PREDICATES}


def _verb_atoms(formula):
    return [a for a in _atoms(formula) if a.predicate in VERB_PREDICATES]


def _other_color(color):
    return {"green": "yellow", "yellow": "green", None: None}[color]


def _object_vars(formula):
    seen = []
    for a in _atoms(formula):
        for t in a.args:
            if getattr(t, "sort", None) == OBJECT_SORT and t not in seen:
                seen.append(t)
    return seen


# ---------------------------------------------------------------------------
# per-class recipes


def _pp_scene(record, i):
    f = record.interpretations[i].formula
    classes, colors = _class_of(f), _color_of(f)
    verb_atom = next(a for a in _verb_atoms(f)
                     if a.predicate in ("approach", "leave"))
    agent = verb_atom.args[0].name
    x, y = _object_vars(f)                       # nn1, nn2 in textual order
    nn1 = (("nn1", classes[x], colors.get(x)), )
    nn2_cls, nn2_col = classes[y], colors.get(y)

    px = 300 if verb_atom.predicate == "approach" else 700
    tracks = list(_perform(verb_atom.predicate, agent, list(nn1), px))
    walker = tracks[0]
    if i == 0:
        # the second object travels with the agent, trailing the walk
        trail = -48 if verb_atom.predicate == "approach" else 48
        tracks.append(_carried("nn2", nn2_cls, nn2_col, walker, trail, -20))
    else:
        # the second object sits beside the first one
        _, ox, oy = tracks[1].keyframes[0]
        tracks.append(_static("nn2", nn2_cls, nn2_col, ox + HELD_DX + 14, oy))
    return tracks


def _vp_scene(record, i):
    f = record.interpretations[i].formula
    classes, colors = _class_of(f), _color_of(f)
    look = next(a for a in _verb_atoms(f) if a.predicate == "look_at")
    other = next(a for a in _verb_atoms(f) if a.predicate != "look_at")
    n1, n2 = look.args[0].name, look.args[1].name
    obj = other.args[1]
    spec = [("obj", classes[obj], colors.get(obj))]
    if i == 0:
        # n2 acts on the object; n1 stands off to the side watching
        tracks = _perform(other.predicate, n2, spec, 640)
        tracks.append(_static(n1, "person", None, 180, PERSON_Y, gaze=n2))
    else:
        # n1 acts on the object with head turned toward n2, who is far away
        tracks = _perform(other.predicate, n1, spec, 640)
        agent = tracks[0]
        tracks[0] = EntityTrack(agent.name, agent.cls, agent.color,
                                agent.keyframes, gaze=n2)
        tracks.append(_static(n2, "person", None, 180, 240))
    return tracks


def _cj_scene(record, i):
    f = record.interpretations[i].formula
    classes, colors = _class_of(f), _color_of(f)
    verb = _verb_atoms(f)[0]
    agent = verb.args[0].name
    x, y = _object_vars(f)
    # reading 1 has no color atom on y: paint y the opposite color so the
    # wide-scope reading is visibly wrong
    y_color = colors.get(y) or _other_color(colors[x])
    spec = [("obj1", classes[x], colors[x]), ("obj2", classes[y], y_color)]
    return _perform("hold", agent, spec, 640)


def _cl_scene(record, i):
    # or/and list: stage exactly the held subset this reading asserts
    f = record.interpretations[i].formula
    all_classes = {}
    for interp in record.interpretations:
        all_classes.update({v.name: c for v, c in _class_of(interp.formula).items()
                            if getattr(v, "sort", None) == OBJECT_SORT})
    agent = _verb_atoms(f)[0].args[0].name
    held = {"cl": ["x"], "cl1": ["x", "z"], "cl2": ["y"]}
    key = {0: "cl", 1: "cl1", 2: "cl2"}[i]
    held_vars = held[key]
    spec = [(v, all_classes[v], None) for v in held_vars]
    tracks = _perform("hold", agent, spec, 640)
    # park the objects this reading does not assert far from the holder
    parked = [v for v in ("x", "y", "z") if v not in held_vars]
    for n, v in enumerate(parked):
        tracks.append(_static(v, all_classes[v], None, 120 + 170 * n, OBJECT_Y))
    return tracks


def _lp_scene(record, i):
    f = record.interpretations[i].formula
    verbs = _verb_atoms(f)
    classes = _class_of(f)
    if i == 0:
        # both agents flank one object and act on it together
        (a1, x), (a2, _) = [(a.args[0].name, a.args[1]) for a in verbs]
        verb = verbs[0].predicate
        spec = [("obj", classes[x], None)]
        if verb == "look_at":
            tracks = [_static(a1, "person", None, 420, PERSON_Y, gaze="obj"),
                      _static(a2, "person", None, 880, PERSON_Y, gaze="obj"),
                      _static("obj", classes[x], None, 650, OBJECT_Y)]
            return tracks
        tracks = _perform(verb, a1, spec, 592)
        if verb == "move":
            tracks.append(_carried(a2, "person", None, tracks[0],
                                   2 * HELD_DX, 0))
        else:
            tracks.append(_static(a2, "person", None, 592 + 2 * HELD_DX,
                                  PERSON_Y))
        return tracks
    # two separated actor/object pairs, gazes pointing outward
    tracks = []
    for n, atom in enumerate(verbs):
        agent, obj = atom.args[0].name, atom.args[1]
        px = 300 if n == 0 else 920
        pair = _perform(atom.predicate, agent, [(f"obj{n}", classes[obj], None)],
                        px, walk=240)
        if atom.predicate == "look_at":
            # mirror the second pair so the gazes diverge
            pair = [_static(agent, "person", None, px, PERSON_Y, gaze=f"obj{n}"),
                    _static(f"obj{n}", classes[obj], None,
                            px - 220 if n == 0 else px + 220, OBJECT_Y)]
        tracks.extend(pair)
    return tracks


_LS_SPLIT = {"u": 0, "v": 1}


def _ls_scene(record, i):
    f = record.interpretations[i].formula
    verbs = _verb_atoms(f)
    classes = _class_of(f)
    if i == 0:
        # one person, both objects at hand
        agent = verbs[0].args[0].name
        spec = [(a.args[1].name, classes[a.args[1]], None) for a in verbs]
        return _perform(verbs[0].predicate, agent, spec, 640)
    # one actor/object pair per person
    tracks = []
    for atom in verbs:
        agent, obj = atom.args[0].name, atom.args[1]
        n = _LS_SPLIT.get(agent, 0)
        px = 300 if n == 0 else 920
        pair = _perform(atom.predicate, agent, [(obj.name, classes[obj], None)],
                        px, walk=240)
        if atom.predicate == "look_at":
            pair = [_static(agent, "person", None, px, PERSON_Y, gaze=obj.name),
                    _static(obj.name, classes[obj], None,
                            px - 220 if n == 0 else px + 220, OBJECT_Y)]
        tracks.extend(pair)
    return tracks


def _an_scene(record, i):
    f = record.interpretations[i].formula
    classes, colors = _class_of(f), _color_of(f)
    verbs = _verb_atoms(f)
    agent = verbs[0].args[0].name
    x, y = _object_vars(f)
    referent = next(iter(colors))                # the pronoun's antecedent
    jj = colors[referent]
    spec = []
    for v, nm in ((x, "obj1"), (y, "obj2")):
        color = jj if v == referent else _other_color(jj)
        spec.append((nm, classes[v], color))
    return _perform(verbs[0].predicate, agent, spec, 640)


def _el_scene(record, i):
    f = record.interpretations[i].formula
    verbs = _verb_atoms(f)
    verb = verbs[0].predicate
    if i == 0:
        # one subject acts toward two targets stacked in depth
        subj = verbs[0].args[0].name
        t1, t2 = verbs[0].args[1].name, verbs[1].args[1].name
        tx = 900
        targets = [_static(t1, "person", None, tx, PERSON_Y - 55, gaze=subj),
                   _static(t2, "person", None, tx, PERSON_Y + 55, gaze=subj)]
        if verb == "look_at":
            # the targets gaze at nobody (default heading points off-frame)
            # so no pair of watchers shares a target across readings
            actor = _static(subj, "person", None, 150, PERSON_Y, gaze=t1)
            targets = [_static(t1, "person", None, 1150, PERSON_Y - 100,
                               facing=(1.0, 0.0)),
                       _static(t2, "person", None, 1150, PERSON_Y + 100,
                               facing=(1.0, 0.0))]
        elif verb == "approach":
            actor = _walk(subj, tx - STOP_DIST - FAR, tx - STOP_DIST, PERSON_Y)
        else:  # leave
            actor = _walk(subj, tx - STOP_DIST, tx - STOP_DIST - FAR,
                          PERSON_Y, t0=0.2, t1=1.0)
        return [actor] + targets
    # two subjects side by side acting on one target in parallel
    s1, s2 = verbs[0].args[0].name, verbs[1].args[0].name
    target = verbs[0].args[1].name
    tx = 900
    tgt = _static(target, "person", None, tx, PERSON_Y, gaze=s1)
    if verb == "look_at":
        # again the watched person gazes at nobody, and the watchers sit
        # far enough apart that no single gaze covers both of them
        tgt = _static(target, "person", None, tx, PERSON_Y, facing=(1.0, 0.0))
        actors = [_static(s1, "person", None, 260, PERSON_Y - 150, gaze=target),
                  _static(s2, "person", None, 260, PERSON_Y + 150, gaze=target)]
    elif verb == "approach":
        actors = [_walk(s, tx - STOP_DIST - FAR, tx - STOP_DIST, y)
                  for s, y in ((s1, PERSON_Y - 55), (s2, PERSON_Y + 55))]
    else:
        actors = [_walk(s, tx - STOP_DIST, tx - STOP_DIST - FAR, y,
                        t0=0.2, t1=1.0)
                  for s, y in ((s1, PERSON_Y - 55), (s2, PERSON_Y + 55))]
    return actors + [tgt]


_RECIPES = {"PP": _pp_scene, "VP": _vp_scene, "LogicalForm": None,
            "Anaphora": _an_scene, "Ellipsis": _el_scene}


def script_for(record, interpretation: int, variation: int = 0) -> SceneScript:
    """A scene in which the given interpretation is the one that happens."""
    if not 0 <= interpretation < len(record.interpretations):
        raise SceneError(f"{record.id}: no interpretation {interpretation}")
    cls = record.ambiguity_class
    if cls == "Conjunction":
        recipe = _cl_scene if len(record.interpretations) == 3 else _cj_scene
    elif cls == "LogicalForm":
        recipe = _ls_scene if record.text.startswith("Someone") else _lp_scene
    else:
        recipe = _RECIPES[cls]
    tracks = recipe(record, interpretation)
    script = SceneScript(
        id=f"{record.id}-i{interpretation}-v{variation}",
        entities=tuple(tracks),
        metadata={"sentence": record.id, "text": record.text,
                  "interpretation": interpretation, "variation": variation})
    if variation == 1:
        script = SceneScript(script.id, script.mirrored().entities,
                             script.metadata)
    elif variation != 0:
        raise SceneError(f"unknown variation {variation}")
    return script


def generate_suite(records, variations: int = 2):
    """Every (sentence, interpretation, variation) scene script."""
    out = []
    for record in records:
        for i in range(len(record.interpretations)):
            for v in range(variations):
                out.append(script_for(record, i, v))
    return out
