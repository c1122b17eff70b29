import numpy as np
import pytest

from disambig.cli import random_tiny_instance
from disambig.corpus import generate_corpus
from disambig.hmms import HMMConfig, build_library
from disambig.inference import (BRUTE_FORCE_CAP, InferenceError, beam_score,
                                brute_force_cost, brute_force_score,
                                score_branch, score_common, score_formula)
from disambig.logic import conj, disj, lit, name_to_person, normalize, Var
from disambig.perception import Detection, NoiseModel, VideoTrace, simulate
from disambig.scenes import script_for


@pytest.fixture(scope="module")
def library():
    return build_library()


@pytest.fixture(scope="module")
def corpus():
    return generate_corpus()


def _assert_same(exact, brute):
    if exact.total == float("-inf"):
        assert brute.total == float("-inf")
        return
    assert exact.total == pytest.approx(brute.total, abs=1e-9)
    assert exact.detections == brute.detections
    assert exact.states == brute.states


def test_dp_matches_oracle_on_tiny_instances(library):
    rng = np.random.default_rng(23)
    for _ in range(50):
        branch, trace = random_tiny_instance(rng)
        _assert_same(score_branch(branch, trace, library),
                     brute_force_score(branch, trace, library))


def test_dp_matches_oracle_on_corpus_instances(library, corpus):
    rng = np.random.default_rng(5)
    done = 0
    while done < 25:
        record = corpus[int(rng.integers(len(corpus)))]
        k = int(rng.integers(len(record.interpretations)))
        script = script_for(record, k, int(rng.integers(2)))
        noise = NoiseModel(jitter_sigma=float(rng.uniform(0, 6)),
                           miss_rate=float(rng.uniform(0, 0.15)),
                           fp_rate=float(rng.uniform(0, 0.4)),
                           confusion=float(rng.uniform(0, 1.0)))
        trace = simulate(script, noise, seed=done, num_frames=4)
        branch = normalize(
            name_to_person(record.interpretations[k].formula))[0]
        if brute_force_cost(branch, trace, library) > BRUTE_FORCE_CAP:
            continue
        done += 1
        _assert_same(score_branch(branch, trace, library),
                     brute_force_score(branch, trace, library))


def test_breakdown_sums_to_total(library, corpus):
    record = corpus[0]
    trace = simulate(script_for(record, 0, 0), seed=1)
    res = score_branch(
        normalize(name_to_person(record.interpretations[0].formula))[0],
        trace, library)
    assert res.feasible
    assert sum(res.breakdown.values()) == pytest.approx(res.total, abs=1e-6)


def test_beam_admissible_and_exact_at_full_width(library):
    rng = np.random.default_rng(31)
    for _ in range(30):
        branch, trace = random_tiny_instance(rng)
        exact = score_branch(branch, trace, library)
        narrow = beam_score(branch, trace, library, beam_width=1)
        assert narrow.total <= exact.total + 1e-9
        full = beam_score(branch, trace, library,
                          beam_width=max(len(f) for f in trace.frames))
        assert full.total == pytest.approx(exact.total, abs=1e-9) \
            or (full.total == exact.total == float("-inf"))
        if exact.feasible:
            assert full.detections == exact.detections


def test_oracle_cap_enforced(library, corpus):
    record = corpus[0]
    trace = simulate(script_for(record, 0, 0), seed=0)  # ~90 frames
    branch = normalize(
        name_to_person(record.interpretations[0].formula))[0]
    assert brute_force_cost(branch, trace, library) > BRUTE_FORCE_CAP
    with pytest.raises(InferenceError):
        brute_force_score(branch, trace, library)


def test_score_formula_takes_best_branch(library, corpus):
    record = corpus[0]
    trace = simulate(script_for(record, 0, 0), seed=0)
    x = Var("x", "object")
    f = disj(conj(lit("chair", x)), conj(lit("bag", x)))
    res = score_formula(f, trace, library)
    assert len(res.branch_totals) == 2
    assert res.total == max(res.branch_totals)
    assert res.branch_index == res.branch_totals.index(res.total)


def test_score_formula_ties_break_low(library, corpus):
    record = corpus[0]
    trace = simulate(script_for(record, 0, 0), seed=0)
    x = Var("x", "object")
    f = disj(conj(lit("chair", x)), conj(lit("chair", x)))
    res = score_formula(f, trace, library)
    assert res.branch_index == 0


def test_score_common_shares_atoms(library, corpus):
    record = corpus[0]
    trace = simulate(script_for(record, 0, 0), seed=0)
    formulas = [i.formula for i in record.interpretations]
    common = score_common(formulas, trace, library)
    best = max(score_formula(f, trace, library).total for f in formulas)
    assert common.feasible
    assert common.total >= best - 1e-9


def test_infeasible_branch_scores_neg_inf():
    library = build_library(HMMConfig(hard=True))
    d = Detection(box=(100, 100, 200, 200), class_scores={"chair": 1.0},
                  color_scores={"green": 1.0})
    trace = VideoTrace("t", [[d], [d]])
    x, y = Var("x", "object"), Var("y", "object")
    branch = normalize(conj(lit("left_of", x, y), lit("right_of", x, y)))[0]
    res = score_branch(branch, trace, library)
    assert not res.feasible
