"""Lexicon: the word inventory used to instantiate sentence templates.

Every entry carries a part-of-speech tag, a visual category and a set of
applicability flags; template expansion consults the flags to decide
which assignments are visually realizable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

__all__ = ["LexiconEntry", "Lexicon", "LexiconError", "load_lexicon",
           "default_lexicon"]

VISUAL_CATEGORIES = ("object", "person", "action", "spatial-relation", "property")


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    pos: str
    category: str
    applicability: frozenset[str] = frozenset()
    predicate: str | None = None
    past: str | None = None
    participle: str | None = None
    singular: str | None = None

    def has(self, flag: str) -> bool:
        return flag in self.applicability


@dataclass
class Lexicon:
    entries: list[LexiconEntry] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            key = (e.surface, e.pos)
            if key in seen:
                raise LexiconError(f"duplicate entry {e.surface!r}/{e.pos}")
            seen.add(key)
            if e.category not in VISUAL_CATEGORIES:
                raise LexiconError(
                    f"{e.surface!r}: unknown visual category {e.category!r}")
        self._index = {(e.surface, e.pos): e for e in self.entries}

    def by_pos(self, pos: str) -> list[LexiconEntry]:
        return [e for e in self.entries if e.pos == pos]

    def get(self, surface: str, pos: str) -> LexiconEntry:
        try:
            return self._index[(surface, pos)]
        except KeyError:
            raise LexiconError(f"no entry {surface!r}/{pos}") from None

    def names(self) -> list[str]:
        return [e.surface for e in self.by_pos("NNP")]

    def find_surface(self, surface: str) -> LexiconEntry | None:
        for e in self.entries:
            if e.surface == surface:
                return e
        return None

    def surfaces(self) -> set[str]:
        return {e.surface for e in self.entries}


def load_lexicon(config) -> Lexicon:
    """Build a lexicon from structured config (dict, JSON text, or path)."""
    if isinstance(config, (str, Path)):
        text = Path(config).read_text() if Path(str(config)).exists() else str(config)
        config = json.loads(text)
    entries = []
    for raw in config["entries"]:
        entries.append(LexiconEntry(
            surface=raw["surface"],
            pos=raw["pos"],
            category=raw["category"],
            applicability=frozenset(raw.get("applicability", ())),
            predicate=raw.get("predicate"),
            past=raw.get("past"),
            participle=raw.get("participle"),
            singular=raw.get("singular"),
        ))
    return Lexicon(entries)


def default_lexicon() -> Lexicon:
    data = resources.files("disambig.data").joinpath("lexicon.json").read_text()
    return load_lexicon(json.loads(data))
