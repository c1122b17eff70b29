import pytest

from disambig.lexicon import (Lexicon, LexiconEntry, LexiconError,
                              default_lexicon, load_lexicon)


@pytest.fixture(scope="module")
def lex():
    return default_lexicon()


def test_names(lex):
    assert lex.names() == ["Sam", "Bill", "Claire", "Clark"]


def test_every_entry_has_known_category(lex):
    assert all(e.category in ("object", "person", "action",
                              "spatial-relation", "property")
               for e in lex.entries)


def test_verbs_carry_inflections_and_predicates(lex):
    for e in lex.by_pos("V"):
        assert e.past and e.participle and e.predicate, e.surface


def test_nouns_cover_detector_classes(lex):
    assert {e.surface for e in lex.by_pos("NN")} >= {"chair", "bag",
                                                     "telescope"}


def test_get_and_missing(lex):
    assert lex.get("chair", "NN").category == "object"
    with pytest.raises(LexiconError):
        lex.get("table", "NN")


def test_applicability_flags(lex):
    assert lex.get("chair", "NN").has("holdable")
    assert not lex.get("chair", "NN").has("no-such-flag")


def test_duplicate_entries_rejected():
    e = LexiconEntry("chair", "NN", "object")
    with pytest.raises(LexiconError):
        Lexicon([e, e])


def test_unknown_category_rejected():
    with pytest.raises(LexiconError):
        Lexicon([LexiconEntry("chair", "NN", "furniture")])


def test_load_from_dict():
    lex = load_lexicon({"entries": [
        {"surface": "box", "pos": "NN", "category": "object",
         "applicability": ["holdable"], "predicate": "box"}]})
    assert lex.get("box", "NN").has("holdable")
