import numpy as np
import pytest

from disambig.corpus import generate_corpus
from disambig.hmms import (HMMConfig, MIRROR_PAIRS, PredicateHMM,
                           build_library, mirror_detection, pack_features)
from disambig.logic import name_to_person, normalize
from disambig.perception import FRAME_WIDTH, Detection


@pytest.fixture(scope="module")
def library():
    return build_library()


def _det(cx, cy, w=100.0, h=100.0, vx=0.0, vy=0.0, heading=None,
         class_scores=None, color_scores=None):
    return Detection(
        box=(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2),
        class_scores=class_scores or {"chair": 1.0},
        color_scores=color_scores or {"green": 1.0},
        velocity=(vx, vy), heading=heading)


def test_library_covers_every_corpus_predicate(library):
    for record in generate_corpus():
        for interp in record.interpretations:
            for branch in normalize(name_to_person(interp.formula)):
                for atom in branch.atoms:
                    assert atom.predicate in library, atom.predicate


def test_transition_rows_stochastic(library):
    for name in library.names():
        m = library.get(name).log_transition
        rows = np.where(np.isfinite(m), np.exp(m), 0.0).sum(axis=1)
        assert np.allclose(rows, 1.0, atol=1e-9), name


def test_initial_and_accepting_states_valid(library):
    for name in library.names():
        model = library.get(name)
        n = model.num_states
        assert model.initial and model.accepting
        assert all(0 <= k < n for k in model.initial + model.accepting)


def test_neq_non_increasing_in_iou(library):
    scores = []
    for target in (0.0, 0.25, 0.5, 0.75, 1.0):
        dx = 100.0 * (1 - target) / (1 + target)
        a = _det(300, 300)
        b = _det(300 + dx + (200 if target == 0.0 else 0), 300)
        pack = pack_features([[a, b]])
        iou = float(pack.iou[0, 0, 1])
        assert iou == pytest.approx(target, abs=1e-9)
        scores.append(library.observe("neq", 0, a, b))
    assert all(s0 >= s1 for s0, s1 in zip(scores, scores[1:]))
    assert scores[0] == 0.0
    assert scores[-1] == library.config.floor


def test_left_right_mirror_equivariance(library):
    rng = np.random.default_rng(11)
    for _ in range(100):
        a = _det(rng.uniform(100, 1180), rng.uniform(100, 620),
                 rng.uniform(20, 200), rng.uniform(20, 200))
        b = _det(rng.uniform(100, 1180), rng.uniform(100, 620),
                 rng.uniform(20, 200), rng.uniform(20, 200))
        left = library.observe("left_of", 0, a, b)
        mirrored = library.observe(
            "right_of", 0, mirror_detection(a, FRAME_WIDTH),
            mirror_detection(b, FRAME_WIDTH))
        assert left == pytest.approx(mirrored, abs=1e-9)


def test_mirror_pairs_are_involutions():
    for a, b in MIRROR_PAIRS.items():
        assert MIRROR_PAIRS[b] == a


def test_satisfied_left_of_scores_zero(library):
    assert library.observe("left_of", 0, _det(200, 300), _det(800, 300)) == 0.0
    assert library.observe("left_of", 0, _det(800, 300), _det(200, 300)) == \
        library.config.floor


def test_approach_states_score_zero_when_satisfied(library):
    far = library.observe("approach", 0, _det(100, 300), _det(900, 300))
    closing = library.observe("approach", 1,
                              _det(100, 300, vx=10.0), _det(500, 300))
    near = library.observe("approach", 2, _det(450, 300), _det(500, 300))
    assert far == closing == near == 0.0
    # a stationary agent cannot be the one approaching
    assert library.observe("approach", 1,
                           _det(500, 300), _det(100, 300, vx=10.0)) < 0.0


def test_single_state_predicates_have_free_self_transition(library):
    for name in ("hold", "look_at", "with", "on", "neq", "chair", "green"):
        assert library.get(name).log_transition.tolist() == [[0.0]]


def test_class_and_color_scores_pass_through(library):
    d = _det(300, 300, class_scores={"chair": -0.2, "person": 0.7},
             color_scores={"yellow": -1.3})
    assert library.observe("chair", 0, d) == pytest.approx(-0.2)
    assert library.observe("person", 0, d) == pytest.approx(0.7)
    assert library.observe("yellow", 0, d) == pytest.approx(-1.3)


def test_hold_satisfied_scores_zero(library):
    assert library.observe("hold", 0, _det(500, 300), _det(530, 330)) == 0.0


def test_look_at_requires_heading(library):
    gazer = _det(200, 300, heading=(1.0, 0.0))
    target = _det(800, 300)
    assert library.observe("look_at", 0, gazer, target) == 0.0
    assert library.observe("look_at", 0, target, gazer) == \
        library.config.floor


def test_observe_arity_checked(library):
    with pytest.raises(ValueError):
        library.observe("chair", 0, _det(0, 0), _det(1, 1))


def test_hmm_state_count_bounds():
    with pytest.raises(ValueError):
        PredicateHMM("p", 1, (), lambda cfg, fp: [])


def test_hard_mode_makes_violations_infinite():
    lib = build_library(HMMConfig(hard=True))
    assert lib.observe("left_of", 0, _det(800, 300), _det(200, 300)) == \
        float("-inf")
    assert lib.observe("left_of", 0, _det(200, 300), _det(800, 300)) == 0.0
