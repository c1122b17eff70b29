"""Command-line interface.

Subcommands: gen-corpus, simulate, score, disambiguate, evaluate and
oracle-check.  Exit codes: 0 on success, 1 on an evaluation error, 2 on
a usage error.
"""

from __future__ import annotations

import argparse
import functools
import json
import math
import sys
from pathlib import Path

import numpy as np

from .corpus import generate_corpus, load_corpus, save_corpus
from .hmms import build_library
from .inference import (beam_score, brute_force_score, score_branch,
                        score_formula)
from .logic import (OBJECT_SORT, PERSON_SORT, Var, conj, lit, normalize,
                    parse_formula)
from .perception import (CLASSES, COLORS, Detection, VideoTrace, load_trace,
                         save_trace, simulate)
from .scenes import generate_suite
from .task import NOISE_PRESETS, disambiguate, run_evaluation

__all__ = ["main", "oracle_check", "random_tiny_instance"]


# ---------------------------------------------------------------------------
# oracle differential check


def random_tiny_instance(rng: np.random.Generator):
    """A random (branch, trace) pair small enough for the exhaustive
    oracle: T<=4 frames, D<=3 detections, V<=2 variables, P<=3 atoms."""
    T = int(rng.integers(2, 5))
    D = int(rng.integers(1, 4))
    frames = []
    for _ in range(T):
        dets = []
        for _ in range(D):
            cx = float(rng.uniform(100, 1180))
            cy = float(rng.uniform(100, 620))
            w = float(rng.uniform(30, 160))
            h = float(rng.uniform(30, 160))
            heading = None
            if rng.random() < 0.7:
                ang = float(rng.uniform(0, 2 * math.pi))
                heading = (math.cos(ang), math.sin(ang))
            dets.append(Detection(
                box=(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2),
                class_scores={c: float(rng.normal(0, 2)) for c in CLASSES},
                color_scores={c: float(rng.normal(0, 2)) for c in COLORS},
                velocity=(float(rng.normal(0, 3)), float(rng.normal(0, 3))),
                heading=heading))
        frames.append(dets)
    trace = VideoTrace(id="tiny", frames=frames)

    u = Var("u", PERSON_SORT)
    v = Var("v", OBJECT_SORT)
    pool = [u, v][:int(rng.integers(1, 3))]
    unary = list(CLASSES) + list(COLORS)
    binary = ["approach", "leave", "hold", "pick_up", "put_down", "move",
              "look_at", "with", "left_of", "right_of", "on", "neq"]
    atoms = []
    for _ in range(int(rng.integers(1, 4))):
        if rng.random() < 0.5:
            atoms.append(lit(unary[int(rng.integers(len(unary)))],
                             pool[int(rng.integers(len(pool)))]))
        else:
            atoms.append(lit(binary[int(rng.integers(len(binary)))],
                             pool[int(rng.integers(len(pool)))],
                             pool[int(rng.integers(len(pool)))]))
    branch = normalize(conj(*atoms))[0]
    return branch, trace


def oracle_check(n: int = 200, seed: int = 7, tol: float = 1e-9):
    """Compare exact DP against the exhaustive oracle on ``n`` random
    tiny instances; returns (matches, n)."""
    rng = np.random.default_rng(seed)
    library = build_library()
    matches = 0
    for _ in range(n):
        branch, trace = random_tiny_instance(rng)
        exact = score_branch(branch, trace, library)
        brute = brute_force_score(branch, trace, library)
        same_total = (exact.total == brute.total
                      or abs(exact.total - brute.total) <= tol)
        same_path = (exact.detections == brute.detections
                     and exact.states == brute.states)
        matches += same_total and (same_path or not exact.feasible)
    return matches, n


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gen_corpus(args) -> int:
    records = generate_corpus()
    save_corpus(records, args.out)
    print(f"wrote {len(records)} sentences to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    records = load_corpus(args.corpus)
    noise = NOISE_PRESETS[args.noise]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scripts = generate_suite(records, args.variations)
    for script in scripts:
        trace = simulate(script, noise, seed=args.seed)
        save_trace(trace, out / f"{script.id}.jsonl")
    print(f"wrote {len(scripts)} traces to {out}")
    return 0


def _cmd_score(args) -> int:
    trace = load_trace(args.trace)
    formula = parse_formula(args.formula)
    library = build_library()
    if args.beam is not None:
        scorer = functools.partial(beam_score, beam_width=args.beam)
        result = score_formula(formula, trace, library, scorer=scorer)
    else:
        result = score_formula(formula, trace, library)
    print(f"score: {result.total}")
    if args.dump_path:
        res = result.result
        print(json.dumps({
            "variables": res.variables, "atoms": res.atoms,
            "detections": res.detections, "states": res.states,
            "breakdown": res.breakdown}, indent=2))
    return 0


def _cmd_disambiguate(args) -> int:
    records = load_corpus(args.corpus)
    trace = load_trace(args.trace)
    sid = args.sentence or trace.metadata.get("sentence")
    record = next((r for r in records if r.id == sid), None)
    if record is None:
        raise ValueError(f"sentence {sid!r} not found in corpus")
    result = disambiguate(record, trace)
    print(json.dumps(result.to_dict(), indent=2))
    chosen = record.interpretations[result.chosen]
    print(f"chosen: {chosen.id}  {chosen.gloss}")
    return 0


def _cmd_evaluate(args) -> int:
    records = load_corpus(args.corpus) if args.corpus else generate_corpus()
    report = run_evaluation(records, noise=args.noise, seed=args.seed,
                            variations=args.variations)
    print(report.render())
    if args.json:
        Path(args.json).write_text(report.to_json() + "\n")
        print(f"\nwrote JSON report to {args.json}")
    return 0


def _cmd_oracle_check(args) -> int:
    matches, n = oracle_check(args.n, args.seed)
    print(f"{matches}/{n} match")
    return 0 if matches == n else 1


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="disambig",
        description="Grounded-language disambiguation pipeline: corpus "
                    "generation, synthetic perception, joint MAP scoring "
                    "and evaluation.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-corpus", help="generate the sentence corpus")
    g.add_argument("--out", required=True, help="output JSONL path")
    g.set_defaults(func=_cmd_gen_corpus)

    s = sub.add_parser("simulate", help="render the scene suite to traces")
    s.add_argument("--corpus", required=True, help="corpus JSONL path")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--noise", default="none", choices=sorted(NOISE_PRESETS))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--variations", type=int, default=2)
    s.set_defaults(func=_cmd_simulate)

    c = sub.add_parser("score", help="score one formula against one trace")
    c.add_argument("--trace", required=True, help="trace JSONL path")
    c.add_argument("--formula", required=True,
                   help='e.g. "and(chair(x), approach(Sam,x))"')
    c.add_argument("--beam", type=int, default=None,
                   help="beam width (default: exact)")
    c.add_argument("--dump-path", action="store_true",
                   help="dump the MAP assignment as JSON")
    c.set_defaults(func=_cmd_score)

    d = sub.add_parser("disambiguate",
                       help="pick the best interpretation for a trace")
    d.add_argument("--corpus", required=True)
    d.add_argument("--trace", required=True)
    d.add_argument("--sentence", default=None,
                   help="sentence id (default: from trace metadata)")
    d.set_defaults(func=_cmd_disambiguate)

    e = sub.add_parser("evaluate", help="run the full evaluation harness")
    e.add_argument("--corpus", default=None,
                   help="corpus JSONL (default: regenerate)")
    e.add_argument("--noise", default="none", choices=sorted(NOISE_PRESETS))
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--variations", type=int, default=2)
    e.add_argument("--json", default=None, help="also write a JSON report")
    e.set_defaults(func=_cmd_evaluate)

    o = sub.add_parser("oracle-check",
                       help="differential-test exact DP vs. brute force")
    o.add_argument("--n", type=int, default=200)
    o.add_argument("--seed", type=int, default=7)
    o.set_defaults(func=_cmd_oracle_check)
    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except Exception as e:               # noqa: BLE001 - CLI boundary
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
