"""Ambiguous-sentence corpus: template expansion and serialization.

Each template row carries the slot fills that make its assignments
visually realizable; expanding the default template file produces 237
sentences (48 PP, 60 VP, 40 Conjunction, 35 LogicalForm, 36 Anaphora,
18 Ellipsis), 213 of them with two candidate interpretations and 24
(the or/and conjunctions) with three.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .grammar import Grammar, default_grammar, parse_all
from .logic import Formula, format_formula, parse_formula, validate
from .semantics import expand_ellipsis, interpret, resolve_anaphora

__all__ = [
    "AMBIGUITY_CLASSES",
    "Template",
    "InterpretationRecord",
    "SentenceRecord",
    "CorpusError",
    "load_templates",
    "default_templates",
    "expand_templates",
    "generate_corpus",
    "save_corpus",
    "load_corpus",
]

AMBIGUITY_CLASSES = ("PP", "VP", "Conjunction", "LogicalForm",
                     "Anaphora", "Ellipsis")

CORPUS_SCHEMA = "corpus-v1"


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Template:
    id: str
    ambiguity_class: str
    pos_sequence: str
    target_count: int
    fills: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        if self.ambiguity_class not in AMBIGUITY_CLASSES:
            raise CorpusError(f"unknown ambiguity class {self.ambiguity_class!r}")
        if self.target_count <= 0:
            raise CorpusError(f"template {self.id}: target_count must be positive")


@dataclass
class InterpretationRecord:
    id: str
    formula: Formula
    gloss: str
    parse: str | None = None


@dataclass
class SentenceRecord:
    id: str
    text: str
    ambiguity_class: str
    interpretations: list[InterpretationRecord]

    def __post_init__(self):
        n = len(self.interpretations)
        if not 2 <= n <= 3:
            raise CorpusError(f"{self.id}: {n} interpretations, expected 2 or 3")
        formulas = [format_formula(i.formula) for i in self.interpretations]
        if len(set(formulas)) != n:
            raise CorpusError(f"{self.id}: interpretations are not distinct")


def load_templates(config) -> list[Template]:
    if isinstance(config, (str, Path)):
        config = json.loads(Path(config).read_text())
    return [Template(id=t["id"], ambiguity_class=t["ambiguity_class"],
                     pos_sequence=t["pos_sequence"],
                     target_count=t["target_count"], fills=t.get("fills", {}))
            for t in config["templates"]]


def default_templates() -> list[Template]:
    data = resources.files("disambig.data").joinpath("templates.json").read_text()
    return load_templates(json.loads(data))


def _present(entry) -> str:
    # third-person singular: inflect the verb's first word
    words = entry.surface.split()
    suffix = "es" if words[0].endswith(("ch", "sh", "s", "x")) else "s"
    return " ".join([words[0] + suffix] + words[1:])


def _syntactic_records(template: Template, texts_and_glosses, grammar: Grammar):
    """Parse each sentence, map every tree to its formula, pair with glosses."""
    records = []
    for n, (text, glosses) in enumerate(texts_and_glosses, 1):
        sid = f"{template.id}-{n:03d}"
        trees = parse_all(text, grammar)
        if len(trees) != len(glosses):
            raise CorpusError(
                f"{sid}: {len(trees)} parses but {len(glosses)} expected "
                f"readings for {text!r}")
        interps = []
        for i, (tree, gloss) in enumerate(zip(trees, glosses)):
            formula = interpret(tree, grammar)
            interps.append(InterpretationRecord(
                id=f"{sid}-i{i}", formula=formula, gloss=gloss,
                parse=tree.bracketed()))
        records.append(SentenceRecord(sid, text, template.ambiguity_class, interps))
    return records


def _expand_pp(template: Template, grammar: Grammar):
    f = template.fills
    lex = grammar.lexicon
    items = []
    for name, verb, nn1, nn2, prep, (jj1, jj2) in itertools.product(
            f["names"], f["verbs"], f["nn1"], f["nn2"], f["preps"],
            f["color_patterns"]):
        past = lex.get(verb, "V").past
        seg1 = f"{jj1} {nn1}" if jj1 else nn1
        seg2 = f"{jj2} {nn2}" if jj2 else nn2
        text = f"{name} {past} the {seg1} {prep} a {seg2}."
        glosses = [f"The {nn2} stays with {name}.",
                   f"The {nn2} stays with the {nn1}."]
        items.append((text, glosses))
    return _syntactic_records(template, items, grammar)


def _expand_vp(template: Template, grammar: Grammar):
    f = template.fills
    lex = grammar.lexicon
    items = []
    for (n1, n2), v1, v2, noun in itertools.product(
            itertools.permutations(f["names"], 2), f["verbs1"], f["verbs2"],
            f["nouns"]):
        e1, e2 = lex.get(v1, "V"), lex.get(v2, "V")
        text = f"{n1} {e1.past} {n2} {e2.participle} a {noun}."
        glosses = [f"{n2} {_present(e2)} the {noun}.",
                   f"{n1} {_present(e2)} the {noun}."]
        items.append((text, glosses))
    return _syntactic_records(template, items, grammar)


def _expand_conj_scope(template: Template, grammar: Grammar):
    f = template.fills
    lex = grammar.lexicon
    items = []
    for name, verb, jj, (nn1, nn2) in itertools.product(
            f["names"], f["verbs"], f["adjectives"], f["noun_pairs"]):
        past = lex.get(verb, "V").past
        text = f"{name} {past} a {jj} {nn1} and {nn2}."
        glosses = [f"Both the {nn1} and the {nn2} are {jj}.",
                   f"Only the {nn1} is {jj}."]
        items.append((text, glosses))
    return _syntactic_records(template, items, grammar)


def _expand_conj_list(template: Template, grammar: Grammar):
    f = template.fills
    lex = grammar.lexicon
    items = []
    for name, verb, (a, b, c) in itertools.product(
            f["names"], f["verbs"], itertools.permutations(f["noun_pool"], 3)):
        e = lex.get(verb, "V")
        text = f"{name} {e.past} the {a} or the {b} and the {c}."
        glosses = [f"{name} {_present(e)} the {a}.",
                   f"{name} {_present(e)} the {a} and the {c}.",
                   f"{name} {_present(e)} the {b}."]
        items.append((text, glosses))
    return _syntactic_records(template, items, grammar)


def _expand_lf_pair(template: Template, grammar: Grammar):
    from .semantics import quantified_interpretations
    f = template.fills
    lex = grammar.lexicon
    records = []
    combos = itertools.product(itertools.combinations(f["names"], 2),
                               f["verbs"], f["nouns"])
    for n, ((n1, n2), verb, noun) in enumerate(combos, 1):
        e = lex.get(verb, "V")
        sid = f"{template.id}-{n:03d}"
        text = f"{n1} and {n2} {e.past} a {noun}."
        formulas = quantified_interpretations(text, grammar)
        glosses = [f"{n1} and {n2} {e.surface} the same {noun}.",
                   f"{n1} and {n2} {e.surface} different {noun}s."]
        interps = [InterpretationRecord(f"{sid}-i{i}", fo, gl)
                   for i, (fo, gl) in enumerate(zip(formulas, glosses))]
        records.append(SentenceRecord(sid, text, template.ambiguity_class, interps))
    return records


def _expand_lf_someone(template: Template, grammar: Grammar):
    from .semantics import quantified_interpretations
    f = template.fills
    lex = grammar.lexicon
    records = []
    for n, (verb, plural) in enumerate(
            itertools.product(f["verbs"], f["plurals"]), 1):
        e = lex.get(verb, "V")
        noun = lex.get(plural, "NNS").singular
        sid = f"{template.id}-{n:03d}"
        text = f"Someone {e.past} the {plural}."
        formulas = quantified_interpretations(text, grammar)
        glosses = [f"One person {_present(e)} both {plural}.",
                   f"Each {noun} is handled by a different person."]
        interps = [InterpretationRecord(f"{sid}-i{i}", fo, gl)
                   for i, (fo, gl) in enumerate(zip(formulas, glosses))]
        records.append(SentenceRecord(sid, text, template.ambiguity_class, interps))
    return records


def _expand_anaphora(template: Template, grammar: Grammar):
    f = template.fills
    lex = grammar.lexicon
    records = []
    combos = list(itertools.product(itertools.permutations(f["noun_pool"], 2),
                                    f["adjectives"], f["verbs"]))
    for n, ((nn1, nn2), jj, verb) in enumerate(combos, 1):
        name = f["names"][(n - 1) % len(f["names"])]
        e = lex.get(verb, "V")
        sid = f"{template.id}-{n:03d}"
        text = f"{name} {e.past} the {nn1} and the {nn2}. It is {jj}."
        resolved = resolve_anaphora(text, grammar)
        if len(resolved) < 2:
            raise CorpusError(f"{sid}: fewer than two antecedents in {text!r}")
        interps = [InterpretationRecord(f"{sid}-i{i}", fo, gloss, tree.bracketed())
                   for i, (_cls, fo, tree, gloss) in enumerate(resolved)]
        records.append(SentenceRecord(sid, text, template.ambiguity_class, interps))
    return records


def _expand_ellipsis_t(template: Template, grammar: Grammar):
    f = template.fills
    lex = grammar.lexicon
    records = []
    combos = itertools.product(itertools.permutations(f["name_pool"], 2),
                               f["verbs"])
    for n, ((n1, n2), verb) in enumerate(combos, 1):
        extra = next(nm for nm in f["names"] if nm not in (n1, n2))
        e = lex.get(verb, "V")
        sid = f"{template.id}-{n:03d}"
        text = f"{n1} {e.past} {n2}. Also {extra}."
        expanded = expand_ellipsis(text, grammar)
        interps = [InterpretationRecord(f"{sid}-i{i}", fo, gloss, tree.bracketed())
                   for i, (_txt, fo, tree, gloss) in enumerate(expanded)]
        records.append(SentenceRecord(sid, text, template.ambiguity_class, interps))
    return records


_EXPANDERS = {
    "pp": _expand_pp,
    "vp": _expand_vp,
    "cj": _expand_conj_scope,
    "cl": _expand_conj_list,
    "lp": _expand_lf_pair,
    "ls": _expand_lf_someone,
    "an": _expand_anaphora,
    "el": _expand_ellipsis_t,
}


def expand_templates(templates: list[Template],
                     grammar: Grammar | None = None) -> list[SentenceRecord]:
    """Expand every template; raises CorpusError when any template's
    generated count misses its target (the delta is reported)."""
    grammar = grammar or default_grammar()
    records: list[SentenceRecord] = []
    deltas = []
    for template in templates:
        expander = _EXPANDERS.get(template.id)
        if expander is None:
            raise CorpusError(f"no expander registered for template {template.id!r}")
        produced = expander(template, grammar)
        if len(produced) != template.target_count:
            deltas.append(f"{template.id}: generated {len(produced)}, "
                          f"target {template.target_count} "
                          f"(delta {len(produced) - template.target_count:+d})")
        records.extend(produced)
    if deltas:
        raise CorpusError("template count reconciliation failed: " + "; ".join(deltas))
    return records


def generate_corpus(grammar: Grammar | None = None) -> list[SentenceRecord]:
    return expand_templates(default_templates(), grammar)


# ---------------------------------------------------------------------------
# serialization (JSON lines, one sentence per line)


def save_corpus(records: list[SentenceRecord], path) -> None:
    lines = [json.dumps({"schema": CORPUS_SCHEMA})]
    for r in records:
        interps = []
        for i in r.interpretations:
            d = {"id": i.id, "formula": format_formula(i.formula), "gloss": i.gloss}
            if i.parse is not None:
                d["parse"] = i.parse
            interps.append(d)
        lines.append(json.dumps({
            "id": r.id, "class": r.ambiguity_class, "text": r.text,
            "interpretations": interps,
        }))
    Path(path).write_text("\n".join(lines) + "\n")


def load_corpus(path) -> list[SentenceRecord]:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise CorpusError("empty corpus file")
    header = json.loads(lines[0])
    if header.get("schema") != CORPUS_SCHEMA:
        raise CorpusError(f"unsupported corpus schema {header.get('schema')!r}")
    records = []
    for ln in lines[1:]:
        raw = json.loads(ln)
        if raw["class"] not in AMBIGUITY_CLASSES:
            raise CorpusError(f"{raw['id']}: unknown ambiguity class {raw['class']!r}")
        interps = []
        for i in raw["interpretations"]:
            formula = parse_formula(i["formula"])
            errors = validate(formula)
            if errors:
                raise CorpusError(f"{i['id']}: invalid formula: {errors}")
            interps.append(InterpretationRecord(
                id=i["id"], formula=formula, gloss=i["gloss"],
                parse=i.get("parse")))
        records.append(SentenceRecord(raw["id"], raw["text"], raw["class"], interps))
    return records
