"""Compositional mapping from parse trees to logic formulas.

Also hosts the non-syntactic interpretation builders: quantifier scope
readings, pronoun anaphora resolution and ellipsis expansion, which
produce candidate meanings that do not correspond to distinct parses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import Grammar, Tree, default_grammar, parse_all
from .logic import (Const, Formula, Lit, Var, conj, disj, lit,
                    OBJECT_SORT, PERSON_SORT)

__all__ = ["interpret", "quantified_interpretations", "resolve_anaphora",
           "expand_ellipsis", "SemanticsError"]


class SemanticsError(ValueError):
    pass


_OBJECT_NAMES = ("x", "y", "z", "x2", "y2", "z2")
_PERSON_NAMES = ("u", "v", "w")


class _Allocator:
    def __init__(self):
        self.objects = iter(_OBJECT_NAMES)
        self.persons = iter(_PERSON_NAMES)

    def object(self) -> Var:
        return Var(next(self.objects), OBJECT_SORT)

    def person(self) -> Var:
        return Var(next(self.persons), PERSON_SORT)


@dataclass
class _Leaf:
    term: object                      # Var or Const
    atoms: list[Formula] = field(default_factory=list)


@dataclass
class _Group:
    op: str                           # "and" | "or"
    children: list = field(default_factory=list)


def _distribute(group, fn) -> Formula:
    if isinstance(group, _Leaf):
        return conj(*group.atoms, fn(group.term)) if group.atoms else fn(group.term)
    parts = [_distribute(c, fn) for c in group.children]
    return conj(*parts) if group.op == "and" else disj(*parts)


def _leaves(group):
    if isinstance(group, _Leaf):
        return [group]
    return [leaf for c in group.children for leaf in _leaves(c)]


def interpret(tree: Tree, grammar: Grammar | None = None) -> Formula:
    """Deterministic semantics: one formula per parse tree."""
    grammar = grammar or default_grammar()
    alloc = _Allocator()

    def verb_predicate(leaf: Tree) -> str:
        tag = "V" if leaf.label == "V" else "VG"
        return grammar.entry(leaf.word, tag).predicate

    def prep_predicate(leaf: Tree) -> str:
        return grammar.entry(leaf.word, "IN").predicate

    def adjective_predicate(leaf: Tree) -> str:
        return grammar.entry(leaf.word, "JJ").predicate

    def nom(tree: Tree):
        # descriptor group: (noun class, [colors]) leaves
        label = tuple(c.label for c in tree.children)
        if label == ("NN",):
            word = tree.children[0].word
            grammar.entry(word, "NN")  # raises on unknown nouns
            return [[word, []]]
        if label == ("JJ", "NOM"):
            color = adjective_predicate(tree.children[0])
            inner = nom(tree.children[1])
            return _mark_colors(inner, color)
        if label == ("NOM", "CC_AND", "NOM"):
            return ["and", nom(tree.children[0]), nom(tree.children[2])]
        raise SemanticsError(f"no semantics for NOM -> {label}")

    def _mark_colors(desc, color):
        if desc and desc[0] in ("and", "or"):
            return [desc[0]] + [_mark_colors(d, color) for d in desc[1:]]
        cls, colors = desc[0]
        return [[cls, colors + [color]]]

    def desc_to_group(desc):
        if desc and desc[0] in ("and", "or"):
            return _Group(desc[0], [desc_to_group(d) for d in desc[1:]])
        cls, colors = desc[0]
        var = alloc.object()
        atoms = [lit(cls, var)] + [lit(c, var) for c in colors]
        return _Leaf(var, atoms)

    def np(tree: Tree):
        label = tuple(c.label for c in tree.children)
        if label == ("NNP",):
            return _Leaf(Const(tree.children[0].word))
        if label == ("NNP", "VPG"):
            term = Const(tree.children[0].word)
            clause = vpg(tree.children[1])(term)
            return _Leaf(term, [clause])
        if label == ("DT", "NOM"):
            return desc_to_group(nom(tree.children[1]))
        if label == ("NP", "CC_OR", "NP"):
            return _Group("or", [np(tree.children[0]), np(tree.children[2])])
        if label == ("NP", "CC_AND", "NP"):
            return _Group("and", [np(tree.children[0]), np(tree.children[2])])
        if label == ("NP", "CC_OR", "NP", "CC_AND", "NP"):
            # flat list reading: three alternatives
            return _Group("or", [np(tree.children[0]), np(tree.children[2]),
                                 np(tree.children[4])])
        if label == ("NP", "PP"):
            head = np(tree.children[0])
            prep, ppgroup = pp(tree.children[1])
            for leaf in _leaves(head):
                leaf.atoms.append(_distribute(
                    ppgroup, lambda o, t=leaf.term: lit(prep, o, t)))
            return head
        raise SemanticsError(f"no semantics for NP -> {label}")

    def pp(tree: Tree):
        prep = prep_predicate(tree.children[0])
        return prep, np(tree.children[1])

    def vpg(tree: Tree):
        verb = verb_predicate(tree.children[0])
        obj = np(tree.children[1])
        return lambda agent: _distribute(obj, lambda o: lit(verb, agent, o))

    def vp(tree: Tree):
        label = tuple(c.label for c in tree.children)
        if label == ("V", "NP"):
            verb = verb_predicate(tree.children[0])
            obj = np(tree.children[1])
            return lambda subj: _distribute(obj, lambda o: lit(verb, subj, o))
        if label == ("VP", "PP"):
            inner = vp(tree.children[0])
            prep, ppgroup = pp(tree.children[1])
            return lambda subj: conj(
                inner(subj),
                _distribute(ppgroup, lambda o: lit(prep, o, subj)))
        if label == ("VP", "VPG"):
            inner = vp(tree.children[0])
            clause = vpg(tree.children[1])
            return lambda subj: conj(inner(subj), clause(subj))
        raise SemanticsError(f"no semantics for VP -> {label}")

    if tree.label != "S":
        raise SemanticsError(f"expected an S tree, got {tree.label}")
    subject = np(tree.children[0])
    predicate = vp(tree.children[1])

    def apply_subject(group):
        if isinstance(group, _Leaf):
            body = predicate(group.term)
            return conj(*group.atoms, body) if group.atoms else body
        if group.op != "and":
            raise SemanticsError("disjunctive subjects are not supported")
        return conj(*[apply_subject(c) for c in group.children])

    return apply_subject(subject)


# ---------------------------------------------------------------------------
# non-syntactic interpretation builders


def _entry_for_past(grammar: Grammar, token: str):
    return grammar.entry(token, "V")


def quantified_interpretations(sentence: str,
                               grammar: Grammar | None = None) -> list[Formula]:
    """Both scope readings of a quantificational sentence.

    Handles "NNP and NNP V a NN" (shared object vs. distinct objects)
    and "Someone V the NNS" (one actor vs. two actors).
    """
    grammar = grammar or default_grammar()
    tokens = grammar.tokenize(sentence)
    names = grammar.lexicon.names()

    if (len(tokens) == 6 and tokens[0] in names and tokens[1] == "and"
            and tokens[2] in names and tokens[4] == "a"):
        n1, n2, verb_tok, noun = tokens[0], tokens[2], tokens[3], tokens[5]
        verb = _entry_for_past(grammar, verb_tok).predicate
        x, y = Var("x", OBJECT_SORT), Var("y", OBJECT_SORT)
        shared = conj(lit(noun, x),
                      lit(verb, Const(n1), x), lit(verb, Const(n2), x))
        distinct = conj(lit(noun, x), lit(noun, y),
                        lit(verb, Const(n1), x), lit(verb, Const(n2), y),
                        lit("neq", x, y))
        return [shared, distinct]

    if (len(tokens) == 4 and tokens[0].lower() == "someone"
            and tokens[2] == "the"):
        verb = _entry_for_past(grammar, tokens[1]).predicate
        plural = grammar.lexicon.get(tokens[3], "NNS")
        noun = plural.singular
        u, v = Var("u", PERSON_SORT), Var("v", PERSON_SORT)
        x, y = Var("x", OBJECT_SORT), Var("y", OBJECT_SORT)
        one = conj(lit("person", u), lit(noun, x), lit(noun, y),
                   lit("neq", x, y), lit(verb, u, x), lit(verb, u, y))
        two = conj(lit("person", u), lit("person", v), lit("neq", u, v),
                   lit(noun, x), lit(noun, y), lit("neq", x, y),
                   lit(verb, u, x), lit(verb, v, y))
        return [one, two]

    raise SemanticsError(f"not a quantificational sentence: {sentence!r}")


def _split_discourse(discourse: str) -> tuple[str, str]:
    parts = [p.strip() for p in discourse.split(".") if p.strip()]
    if len(parts) != 2:
        raise SemanticsError(
            f"expected a two-sentence discourse, got {discourse!r}")
    return parts[0], parts[1]


def resolve_anaphora(discourse: str, grammar: Grammar | None = None):
    """One (antecedent, formula, parse, gloss) per candidate antecedent of
    the pronoun in "<sentence>. It is JJ."."""
    grammar = grammar or default_grammar()
    first, second = _split_discourse(discourse)
    words = second.split()
    if len(words) != 3 or words[0] != "It" or words[1] != "is":
        raise SemanticsError(f"second sentence is not 'It is JJ': {second!r}")
    color = grammar.entry(words[2], "JJ").predicate

    trees = parse_all(first, grammar)
    if len(trees) != 1:
        raise SemanticsError(f"antecedent sentence is ambiguous: {first!r}")
    base = interpret(trees[0], grammar)
    candidates = [v for v in base.variables() if v.sort == OBJECT_SORT]
    if not candidates:
        raise SemanticsError(f"no candidate antecedents in {first!r}")

    class_of = {a.args[0]: a.predicate for a in base.atoms()
                if len(a.args) == 1 and isinstance(a.args[0], Var)}
    out = []
    for var in candidates:
        formula = conj(base, lit(color, var))
        gloss = "The %s is %s." % (class_of.get(var, "object"), words[2])
        out.append((class_of.get(var, "object"), formula, trees[0], gloss))
    return out


def expand_ellipsis(discourse: str, grammar: Grammar | None = None):
    """Two readings of "<NNP V NNP>. Also NNP.": the extra name joins the
    object or joins the subject.  Returns (text, formula, parse, gloss)
    tuples for the reconstructed unambiguous sentences."""
    grammar = grammar or default_grammar()
    first, second = _split_discourse(discourse)
    words = second.split()
    if len(words) != 2 or words[0] != "Also":
        raise SemanticsError(f"second sentence is not 'Also NNP': {second!r}")
    extra = words[1]
    tokens = grammar.tokenize(first)
    names = grammar.lexicon.names()
    if len(tokens) != 3 or tokens[0] not in names or tokens[2] not in names:
        raise SemanticsError(f"first sentence is not 'NNP V NNP': {first!r}")
    subj, verb_tok, obj = tokens

    out = []
    for text in (f"{subj} {verb_tok} {obj} and {extra}",
                 f"{subj} and {extra} {verb_tok} {obj}"):
        trees = parse_all(text, grammar)
        if len(trees) != 1:
            raise SemanticsError(f"reconstruction is ambiguous: {text!r}")
        formula = interpret(trees[0], grammar)
        out.append((text + ".", formula, trees[0], text + "."))
    return out
