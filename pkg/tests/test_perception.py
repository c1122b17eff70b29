import math

import pytest

from disambig.corpus import generate_corpus
from disambig.perception import (Detection, NoiseModel, TraceError,
                                 VideoTrace, load_trace, motion_coherence,
                                 save_trace, simulate)
from disambig.scenes import script_for


@pytest.fixture(scope="module")
def record():
    return generate_corpus()[0]


@pytest.fixture(scope="module")
def script(record):
    return script_for(record, 0, 0)


def _det(cx, cy, vx=0.0, vy=0.0):
    return Detection(box=(cx - 20, cy - 20, cx + 20, cy + 20),
                     class_scores={"chair": 1.8}, color_scores={"green": 1.8},
                     velocity=(vx, vy))


def test_simulate_deterministic(script):
    a = simulate(script, NoiseModel(jitter_sigma=5, miss_rate=0.1,
                                    fp_rate=0.5, confusion=1.0), seed=3)
    b = simulate(script, NoiseModel(jitter_sigma=5, miss_rate=0.1,
                                    fp_rate=0.5, confusion=1.0), seed=3)
    assert len(a) == len(b)
    for fa, fb in zip(a.frames, b.frames):
        assert [d.box for d in fa] == [d.box for d in fb]


def test_simulate_seed_changes_noise(script):
    noise = NoiseModel(jitter_sigma=5)
    a = simulate(script, noise, seed=1)
    b = simulate(script, noise, seed=2)
    assert any(da.box != db.box
               for fa, fb in zip(a.frames, b.frames)
               for da, db in zip(fa, fb))


def test_zero_noise_boxes_on_ground_truth(script):
    trace = simulate(script, seed=0)
    for frame in trace.frames:
        assert len(frame) == len(script.entities)
        for det in frame:
            x1, y1, x2, y2 = det.box
            assert 0 <= (x1 + x2) / 2 <= trace.width
            assert 0 <= (y1 + y2) / 2 <= trace.height


def test_person_headings_are_unit_vectors(script):
    trace = simulate(script, seed=0)
    for frame in trace.frames:
        for det in frame:
            if det.heading is not None:
                assert math.hypot(*det.heading) == pytest.approx(1.0)


def test_frames_never_empty_under_heavy_miss(script):
    trace = simulate(script, NoiseModel(miss_rate=0.99), seed=0)
    assert all(frame for frame in trace.frames)


def test_false_positives_low_confidence(script):
    clean = simulate(script, seed=5)
    noisy = simulate(script, NoiseModel(fp_rate=2.0), seed=5)
    extra = sum(len(f) for f in noisy.frames) - sum(len(f) for f in clean.frames)
    assert extra > 0
    for frame in noisy.frames:
        for det in frame[len(script.entities):]:
            assert det.confidence < 1.0


def test_num_frames_override(script):
    assert len(simulate(script, seed=0, num_frames=30)) == 30
    with pytest.raises(TraceError):
        simulate(script, seed=0, num_frames=1)


def test_motion_coherence_zero_iff_consistent():
    prev = _det(100, 100, vx=10, vy=0)
    assert motion_coherence(prev, _det(110, 100)) == 0.0
    assert motion_coherence(prev, _det(130, 100)) < 0.0


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(miss_rate=1.0)
    with pytest.raises(ValueError):
        NoiseModel(jitter_sigma=-1)


def test_trace_requires_two_nonempty_frames():
    with pytest.raises(TraceError):
        VideoTrace("t", [[_det(0, 0)]])
    with pytest.raises(TraceError):
        VideoTrace("t", [[_det(0, 0)], []])


def test_roundtrip(tmp_path, script):
    trace = simulate(script, NoiseModel(jitter_sigma=3, fp_rate=0.5), seed=9)
    path = tmp_path / "trace.jsonl"
    save_trace(trace, path)
    back = load_trace(path)
    assert back.id == trace.id and len(back) == len(trace)
    assert back.metadata == trace.metadata
    for fa, fb in zip(trace.frames, back.frames):
        for da, db in zip(fa, fb):
            assert da.box == pytest.approx(db.box, abs=1e-3)
            assert da.heading == (db.heading if db.heading is None
                                  else pytest.approx(db.heading, abs=1e-5))


def test_load_rejects_bad_schema(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"schema": "trace-v99", "id": "x"}\n')
    with pytest.raises(TraceError):
        load_trace(path)
