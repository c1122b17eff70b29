import pytest

from disambig.corpus import (CorpusError, InterpretationRecord, SentenceRecord,
                             Template, default_templates, expand_templates,
                             generate_corpus, load_corpus, save_corpus)
from disambig.logic import format_formula, lit, conj, Var, OBJECT_SORT, validate


@pytest.fixture(scope="module")
def corpus():
    return generate_corpus()


def test_total_count(corpus):
    assert len(corpus) == 237


def test_per_class_counts(corpus):
    counts = {}
    for r in corpus:
        counts[r.ambiguity_class] = counts.get(r.ambiguity_class, 0) + 1
    assert counts == {"PP": 48, "VP": 60, "Conjunction": 40,
                      "LogicalForm": 35, "Anaphora": 36, "Ellipsis": 18}


def test_interpretation_split(corpus):
    twos = sum(1 for r in corpus if len(r.interpretations) == 2)
    threes = sum(1 for r in corpus if len(r.interpretations) == 3)
    assert (twos, threes) == (213, 24)
    assert twos + threes == len(corpus)


def test_three_way_sentences_are_or_and_conjunctions(corpus):
    for r in corpus:
        if len(r.interpretations) == 3:
            assert r.ambiguity_class == "Conjunction"
            assert " or " in r.text and " and " in r.text


def test_ids_unique_and_well_formed(corpus):
    sids = [r.id for r in corpus]
    assert len(set(sids)) == len(sids)
    iids = [i.id for r in corpus for i in r.interpretations]
    assert len(set(iids)) == len(iids)
    for r in corpus:
        for n, i in enumerate(r.interpretations):
            assert i.id == f"{r.id}-i{n}"


def test_texts_unique(corpus):
    texts = [r.text for r in corpus]
    assert len(set(texts)) == len(texts)


def test_all_formulas_validate(corpus):
    for r in corpus:
        for i in r.interpretations:
            assert validate(i.formula) == [], i.id


def test_interpretations_distinct_within_sentence(corpus):
    for r in corpus:
        rendered = [format_formula(i.formula) for i in r.interpretations]
        assert len(set(rendered)) == len(rendered), r.id


def test_pp_reference_sentence(corpus):
    r = next(r for r in corpus if r.text == "Sam approached the chair with a bag.")
    assert [format_formula(i.formula) for i in r.interpretations] == [
        "and(chair(x), approach(Sam,x), bag(y), with(y,Sam))",
        "and(chair(x), bag(y), with(y,x), approach(Sam,x))",
    ]


def test_vp_reference_sentence(corpus):
    r = next(r for r in corpus if r.text == "Sam looked at Bill picking up a chair.")
    assert [format_formula(i.formula) for i in r.interpretations] == [
        "and(chair(x), pick_up(Bill,x), look_at(Sam,Bill))",
        "and(look_at(Sam,Bill), chair(x), pick_up(Sam,x))",
    ]


def test_logicalform_pair_readings(corpus):
    r = next(r for r in corpus if r.text == "Sam and Bill picked up a chair.")
    shared, distinct = [format_formula(i.formula) for i in r.interpretations]
    assert "neq" not in shared
    assert "neq(x,y)" in distinct


def test_anaphora_colors_each_antecedent(corpus):
    r = next(r for r in corpus
             if r.text == "Sam held the bag and the chair. It is yellow.")
    f0, f1 = [format_formula(i.formula) for i in r.interpretations]
    assert "yellow(x)" in f0 and "yellow(y)" in f1


def test_ellipsis_reconstructions(corpus):
    r = next(r for r in corpus if r.text == "Sam looked at Bill. Also Claire.")
    f0, f1 = [format_formula(i.formula) for i in r.interpretations]
    assert f0 == "and(look_at(Sam,Bill), look_at(Sam,Claire))"
    assert f1 == "and(look_at(Sam,Bill), look_at(Claire,Bill))"


def test_parses_present_for_syntactic_classes(corpus):
    for r in corpus:
        if r.ambiguity_class in ("PP", "VP", "Conjunction"):
            assert all(i.parse for i in r.interpretations), r.id


def test_roundtrip(tmp_path, corpus):
    path = tmp_path / "corpus.jsonl"
    save_corpus(corpus, path)
    back = load_corpus(path)
    assert len(back) == len(corpus)
    for a, b in zip(corpus, back):
        assert (a.id, a.text, a.ambiguity_class) == (b.id, b.text, b.ambiguity_class)
        for i, j in zip(a.interpretations, b.interpretations):
            assert i.id == j.id and i.gloss == j.gloss and i.parse == j.parse
            assert format_formula(i.formula) == format_formula(j.formula)


def test_load_rejects_bad_schema(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"schema": "corpus-v99"}\n')
    with pytest.raises(CorpusError):
        load_corpus(path)


def test_sentence_record_rejects_single_interpretation():
    x = Var("x", OBJECT_SORT)
    interp = InterpretationRecord("s-1-i0", conj(lit("chair", x)), "gloss")
    with pytest.raises(CorpusError):
        SentenceRecord("s-1", "text", "PP", [interp])


def test_sentence_record_rejects_duplicate_interpretations():
    x = Var("x", OBJECT_SORT)
    f = conj(lit("chair", x))
    interps = [InterpretationRecord("s-1-i0", f, "a"),
               InterpretationRecord("s-1-i1", f, "b")]
    with pytest.raises(CorpusError):
        SentenceRecord("s-1", "text", "PP", interps)


def test_count_reconciliation_error():
    t = default_templates()
    wrong = [Template(t[0].id, t[0].ambiguity_class, t[0].pos_sequence,
                      t[0].target_count + 1, t[0].fills)] + t[1:]
    with pytest.raises(CorpusError, match="reconciliation"):
        expand_templates(wrong)


def test_generation_deterministic(corpus):
    again = generate_corpus()
    assert [(r.id, r.text) for r in again] == [(r.id, r.text) for r in corpus]
