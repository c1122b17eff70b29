"""Deterministic CFG parsing with exhaustive ambiguity enumeration.

The grammar is small and fixed: it covers exactly the constructions the
sentence templates produce.  ``parse_all`` returns every distinct tree
for a sentence, ordered so that the canonical reading (lowest/leftmost
attachment) comes first; that order is what interpretation indices are
keyed to.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lexicon import Lexicon, default_lexicon

__all__ = ["Tree", "Grammar", "ParseError", "parse_all", "tokenize",
           "default_grammar"]


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class Tree:
    label: str
    children: tuple = ()      # sub-Trees; empty for leaves
    word: str | None = None   # set on leaves only

    def is_leaf(self) -> bool:
        return self.word is not None

    def bracketed(self) -> str:
        if self.is_leaf():
            return f"[{self.label} {self.word}]"
        return "[%s %s]" % (self.label, " ".join(c.bracketed() for c in self.children))

    def leaves(self) -> list["Tree"]:
        if self.is_leaf():
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def __str__(self):
        return self.bracketed()


# Rule alternatives are tried in declaration order; within one rule, split
# points run left to right.  This fixes the canonical parse order:
# VP-attachment before NP-attachment for PP sentences, object-participle
# before subject-participle for VP sentences, wide adjective scope before
# narrow, and right-bracketed or/and before left-bracketed before flat.
RULES: list[tuple[str, tuple[str, ...]]] = [
    ("S", ("NP", "VP")),
    ("VP", ("VP", "PP")),
    ("VP", ("V", "NP")),
    ("VP", ("VP", "VPG")),
    ("VPG", ("VG", "NP")),
    ("PP", ("IN", "NP")),
    ("NP", ("NNP",)),
    ("NP", ("NNP", "VPG")),
    ("NP", ("DT", "NOM")),
    ("NP", ("NP", "CC_OR", "NP")),
    ("NP", ("NP", "CC_AND", "NP")),
    ("NP", ("NP", "CC_OR", "NP", "CC_AND", "NP")),
    ("NP", ("NP", "PP")),
    ("NOM", ("JJ", "NOM")),
    ("NOM", ("NOM", "CC_AND", "NOM")),
    ("NOM", ("NN",)),
]

FUNCTION_WORDS = {"the": "DT", "a": "DT", "and": "CC_AND", "or": "CC_OR"}


class Grammar:
    """Token categorizer plus the fixed rule set above."""

    def __init__(self, lexicon: Lexicon | None = None):
        self.lexicon = lexicon or default_lexicon()
        # form -> [(tag, lexicon entry)]; multiword forms keep their space
        self._forms: dict[str, list[tuple[str, object]]] = {}
        self._multi: dict[tuple[str, ...], str] = {}
        for e in self.lexicon.entries:
            if e.pos == "V":
                forms = [(e.past, "V"), (e.participle, "VG")]
            else:
                forms = [(e.surface, e.pos)]
            for surface, tag in forms:
                if surface is None:
                    continue
                self._forms.setdefault(surface, []).append((tag, e))
                words = tuple(surface.split())
                if len(words) > 1:
                    self._multi[words] = surface

    def tag(self, token: str) -> list[str]:
        tags = [t for t, _ in self._forms.get(token, [])]
        if token in FUNCTION_WORDS:
            tags.append(FUNCTION_WORDS[token])
        return tags

    def entry(self, token: str, tag: str):
        """Lexicon entry behind a (possibly inflected) token form."""
        for t, e in self._forms.get(token, []):
            if t == tag:
                return e
        raise ParseError(f"no lexicon entry for {token!r}/{tag}")

    def tokenize(self, sentence: str) -> list[str]:
        """Split into tokens, merging multiword verbs and prepositions."""
        raw = sentence.replace(".", " ").split()
        out, i = [], 0
        while i < len(raw):
            for span in (3, 2):
                words = tuple(raw[i:i + span])
                if words in self._multi:
                    out.append(self._multi[words])
                    i += span
                    break
            else:
                out.append(raw[i])
                i += 1
        return out


def tokenize(sentence: str, grammar: Grammar | None = None) -> list[str]:
    return (grammar or default_grammar()).tokenize(sentence)


def parse_all(sentence, grammar: Grammar | None = None) -> list[Tree]:
    """Every distinct parse of the sentence, canonical order.

    ``sentence`` is a string or a pre-tokenized list.  Raises ParseError
    when a token is outside the grammar or no tree spans the sentence.
    """
    grammar = grammar or default_grammar()
    tokens = grammar.tokenize(sentence) if isinstance(sentence, str) else list(sentence)
    n = len(tokens)
    if n == 0:
        raise ParseError("empty sentence")

    # chart[(sym, i, j)] -> list of trees, built bottom-up by span length
    chart: dict[tuple[str, int, int], list[Tree]] = {}
    for i, tok in enumerate(tokens):
        tags = grammar.tag(tok)
        if not tags:
            raise ParseError(f"token {tok!r} is not in the grammar")
        for tag in tags:
            chart.setdefault((tag, i, i + 1), []).append(Tree(tag, word=tok))

    def splits(symbols, i, j):
        # all ways to cover [i, j) by the RHS symbols, left to right
        if len(symbols) == 1:
            for tree in chart.get((symbols[0], i, j), ()):
                yield (tree,)
            return
        head, rest = symbols[0], symbols[1:]
        for mid in range(i + 1, j - len(rest) + 1):
            heads = chart.get((head, i, mid))
            if not heads:
                continue
            for tail in splits(rest, mid, j):
                for h in heads:
                    yield (h,) + tail

    for length in range(1, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            changed = True
            while changed:  # unary/left-recursive closure within the cell
                changed = False
                for lhs, rhs in RULES:
                    if len(rhs) > length:
                        continue
                    for children in splits(rhs, i, j):
                        tree = Tree(lhs, children)
                        cell = chart.setdefault((lhs, i, j), [])
                        if tree not in cell:
                            cell.append(tree)
                            changed = True

    trees = chart.get(("S", 0, n), [])
    if not trees:
        raise ParseError(f"no parse for: {' '.join(tokens)}")
    return _canonical_order(trees)


def _rule_rank(tree: Tree) -> tuple:
    if tree.is_leaf():
        return (0,)
    labels = tuple(c.label for c in tree.children)
    try:
        idx = RULES.index((tree.label, labels))
    except ValueError:
        idx = len(RULES)
    return (idx,) + tuple(r for c in tree.children for r in _rule_rank(c))


def _canonical_order(trees: list[Tree]) -> list[Tree]:
    return sorted(trees, key=_rule_rank)


_DEFAULT: Grammar | None = None


def default_grammar() -> Grammar:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Grammar()
    return _DEFAULT
