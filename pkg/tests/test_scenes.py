import pytest

from disambig.corpus import generate_corpus
from disambig.perception import FRAME_HEIGHT, FRAME_WIDTH
from disambig.scenes import SceneError, generate_suite, script_for


@pytest.fixture(scope="module")
def corpus():
    return generate_corpus()


@pytest.fixture(scope="module")
def suite(corpus):
    return generate_suite(corpus)


def test_suite_covers_every_interpretation_twice(corpus, suite):
    expected = 2 * sum(len(r.interpretations) for r in corpus)
    assert len(suite) == expected == 996


def test_suite_ids_unique(suite):
    ids = [s.id for s in suite]
    assert len(set(ids)) == len(ids)


def test_metadata_references_corpus(corpus, suite):
    by_id = {r.id: r for r in corpus}
    for s in suite:
        record = by_id[s.metadata["sentence"]]
        assert 0 <= s.metadata["interpretation"] < len(record.interpretations)
        assert s.metadata["variation"] in (0, 1)


def test_tracks_stay_in_frame(suite):
    for s in suite:
        for e in s.entities:
            for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
                x, y = s.position(e.name, frac)
                assert 0 <= x <= FRAME_WIDTH, (s.id, e.name)
                assert 0 <= y <= FRAME_HEIGHT, (s.id, e.name)


def test_mirrored_variation_flips_x(corpus):
    record = corpus[0]
    plain = script_for(record, 0, 0)
    mirrored = script_for(record, 0, 1)
    for e in plain.entities:
        x, y = plain.position(e.name, 0.5)
        mx, my = mirrored.position(e.name, 0.5)
        assert mx == pytest.approx(FRAME_WIDTH - x)
        assert my == pytest.approx(y)


def test_position_interpolates_keyframes(corpus):
    s = script_for(corpus[0], 0, 0)
    walker = next(e for e in s.entities
                  if len({(x, y) for _, x, y in e.keyframes}) > 1)
    (f0, x0, y0), (f1, x1, y1) = walker.keyframes[0], walker.keyframes[1]
    mid = (f0 + f1) / 2
    assert s.position(walker.name, mid) == \
        pytest.approx(((x0 + x1) / 2, (y0 + y1) / 2))


def test_unknown_interpretation_rejected(corpus):
    with pytest.raises(SceneError):
        script_for(corpus[0], 5, 0)
    with pytest.raises(SceneError):
        script_for(corpus[0], 0, 2)
