"""First-order-logic meaning representations.

Formulas are trees of atoms, conjunctions and disjunctions over typed
variables and proper-name constants.  Scoring works on conjunctive
branches (one disjunct of the disjunctive normal form), so the main jobs
of this module are validation, replacing proper names by fresh person
variables, and DNF expansion.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

__all__ = [
    "Var",
    "Const",
    "Atom",
    "Formula",
    "And",
    "Or",
    "ConjunctiveBranch",
    "FormulaError",
    "PREDICATE_ARITY",
    "validate",
    "name_to_person",
    "normalize",
    "theta_of",
    "format_formula",
    "parse_formula",
]

PERSON_SORT = "person"
OBJECT_SORT = "object"

CLASS_PREDICATES = {"person": PERSON_SORT, "chair": OBJECT_SORT,
                    "bag": OBJECT_SORT, "telescope": OBJECT_SORT}
COLOR_PREDICATES = ("yellow", "green")
SPATIAL_PREDICATES = ("with", "left_of", "right_of", "on")
VERB_PREDICATES = ("pick_up", "put_down", "hold", "move", "look_at",
                   "approach", "leave")
NEQ = "neq"

PREDICATE_ARITY = {p: 1 for p in CLASS_PREDICATES}
PREDICATE_ARITY.update({p: 1 for p in COLOR_PREDICATES})
PREDICATE_ARITY.update({p: 2 for p in SPATIAL_PREDICATES})
PREDICATE_ARITY.update({p: 2 for p in VERB_PREDICATES})
PREDICATE_ARITY[NEQ] = 2

# Allowed argument sorts, None meaning either sort is acceptable.
_VERB_SIGNATURES = {
    "pick_up": (PERSON_SORT, OBJECT_SORT),
    "put_down": (PERSON_SORT, OBJECT_SORT),
    "hold": (PERSON_SORT, OBJECT_SORT),
    "move": (PERSON_SORT, OBJECT_SORT),
    "look_at": (PERSON_SORT, None),
    "approach": (PERSON_SORT, None),
    "leave": (PERSON_SORT, None),
}


class FormulaError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Var:
    name: str
    sort: str = OBJECT_SORT

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Const:
    name: str

    def __str__(self):
        return self.name


Term = Var | Const


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]

    @property
    def is_neq(self) -> bool:
        return self.predicate == NEQ

    def __str__(self):
        return "%s(%s)" % (self.predicate, ",".join(str(a) for a in self.args))


class Formula:
    """Base class; concrete nodes are Atom wrappers, And, Or."""

    def atoms(self) -> list[Atom]:
        raise NotImplementedError

    def children(self) -> list["Formula"]:
        return []

    def variables(self) -> list[Var]:
        seen: dict[Var, None] = {}
        for atom in self.atoms():
            for arg in atom.args:
                if isinstance(arg, Var):
                    seen.setdefault(arg)
        return list(seen)

    def constants(self) -> list[Const]:
        seen: dict[Const, None] = {}
        for atom in self.atoms():
            for arg in atom.args:
                if isinstance(arg, Const):
                    seen.setdefault(arg)
        return list(seen)

    def __str__(self):
        return format_formula(self)

    def __eq__(self, other):
        return isinstance(other, Formula) and format_formula(self) == format_formula(other)

    def __hash__(self):
        return hash(format_formula(self))


@dataclass(frozen=True, eq=False)
class Lit(Formula):
    atom: Atom

    def atoms(self):
        return [self.atom]


@dataclass(frozen=True, eq=False)
class And(Formula):
    parts: tuple[Formula, ...]

    def atoms(self):
        return [a for p in self.parts for a in p.atoms()]

    def children(self):
        return list(self.parts)


@dataclass(frozen=True, eq=False)
class Or(Formula):
    parts: tuple[Formula, ...]

    def atoms(self):
        return [a for p in self.parts for a in p.atoms()]

    def children(self):
        return list(self.parts)


def lit(predicate: str, *args: Term) -> Lit:
    return Lit(Atom(predicate, tuple(args)))


def conj(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.parts)
        else:
            flat.append(p)
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


@dataclass
class ConjunctiveBranch:
    """One disjunct of a formula's DNF: pure conjunction plus argument map.

    ``theta[i]`` gives, for ``atoms[i]``, the indices into ``variables``
    filling its argument slots.
    """

    variables: list[Var]
    atoms: list[Atom]
    theta: list[tuple[int, ...]] = field(default_factory=list)

    def __post_init__(self):
        if not self.theta:
            index = {v: i for i, v in enumerate(self.variables)}
            theta = []
            for atom in self.atoms:
                try:
                    theta.append(tuple(index[a] for a in atom.args))
                except KeyError as exc:
                    raise FormulaError(
                        f"atom {atom} references an undeclared term {exc.args[0]}")
            self.theta = theta

    def rebuild_atoms(self) -> list[Atom]:
        """Reconstruct atom arguments from theta; used as a round-trip check."""
        return [Atom(a.predicate, tuple(self.variables[i] for i in slots))
                for a, slots in zip(self.atoms, self.theta)]


# ---------------------------------------------------------------------------
# validation

def _branch_atom_sets(formula: Formula) -> list[list[Atom]]:
    if isinstance(formula, Lit):
        return [[formula.atom]]
    if isinstance(formula, And):
        out = [[]]
        for part in formula.parts:
            out = [cur + nxt for cur in out for nxt in _branch_atom_sets(part)]
        return out
    if isinstance(formula, Or):
        return [b for part in formula.parts for b in _branch_atom_sets(part)]
    raise FormulaError(f"unknown formula node {formula!r}")


def _term_sort(term: Term) -> str:
    if isinstance(term, Const):
        return PERSON_SORT  # proper names always denote people
    return term.sort


def validate(formula: Formula) -> list[str]:
    """Check arities, variable binding and sort agreement.

    Returns a list of violations; an empty list means the formula is fine.
    """
    errors = []
    for atom in formula.atoms():
        arity = PREDICATE_ARITY.get(atom.predicate)
        if arity is None:
            errors.append(f"unknown predicate {atom.predicate}")
            continue
        if len(atom.args) != arity:
            errors.append(
                f"{atom}: arity {len(atom.args)}, expected {arity}")
            continue
        if atom.is_neq:
            if atom.args[0] == atom.args[1]:
                errors.append(f"{atom}: neq needs two distinct terms")
            elif _term_sort(atom.args[0]) != _term_sort(atom.args[1]):
                errors.append(f"{atom}: neq over mixed sorts")
        if atom.predicate in CLASS_PREDICATES:
            want = CLASS_PREDICATES[atom.predicate]
            if _term_sort(atom.args[0]) != want:
                errors.append(f"{atom}: argument is not {want}-sorted")
        if atom.predicate in COLOR_PREDICATES:
            if _term_sort(atom.args[0]) != OBJECT_SORT:
                errors.append(f"{atom}: colors apply to objects")
        if atom.predicate in _VERB_SIGNATURES:
            for want, arg in zip(_VERB_SIGNATURES[atom.predicate], atom.args):
                if want is not None and _term_sort(arg) != want:
                    errors.append(f"{atom}: {arg} is not {want}-sorted")
    # Binding: within every branch, each variable must be anchored by a
    # class atom (person/chair/bag/telescope) so trackers know what to bind.
    for branch in _branch_atom_sets(formula):
        declared = {a.args[0] for a in branch
                    if a.predicate in CLASS_PREDICATES and len(a.args) == 1}
        for atom in branch:
            for arg in atom.args:
                if isinstance(arg, Var) and arg not in declared:
                    errors.append(
                        f"{atom}: variable {arg} has no class atom in its branch")
    # Duplicate variable names with conflicting sorts.
    by_name: dict[str, set[str]] = {}
    for v in formula.variables():
        by_name.setdefault(v.name, set()).add(v.sort)
    for name, sorts in by_name.items():
        if len(sorts) > 1:
            errors.append(f"variable {name} declared with multiple sorts")
    return errors


# ---------------------------------------------------------------------------
# proper-name elimination

_FRESH_NAMES = ("u", "v", "w")


def _fresh_person_names(taken: set[str]):
    for name in _FRESH_NAMES:
        if name not in taken:
            yield name
    for i in itertools.count(1):
        name = f"u{i}"
        if name not in taken:
            yield name


def name_to_person(formula: Formula) -> Formula:
    """Replace proper-name constants by fresh person variables.

    Each distinct name becomes one person-sorted variable with a person
    class atom; pairwise ``neq`` atoms keep variables standing for
    different names apart.  Idempotent: formulas without constants are
    returned unchanged.
    """
    consts = formula.constants()
    if not consts:
        return formula
    taken = {v.name for v in formula.variables()}
    fresh = _fresh_person_names(taken)
    mapping = {c: Var(next(fresh), PERSON_SORT) for c in consts}

    def rewrite(node: Formula) -> Formula:
        if isinstance(node, Lit):
            args = tuple(mapping.get(a, a) for a in node.atom.args)
            return Lit(Atom(node.atom.predicate, args))
        if isinstance(node, And):
            return And(tuple(rewrite(p) for p in node.parts))
        if isinstance(node, Or):
            return Or(tuple(rewrite(p) for p in node.parts))
        raise FormulaError(f"unknown formula node {node!r}")

    header: list[Formula] = [lit("person", v) for v in mapping.values()]
    people = list(mapping.values())
    for a, b in itertools.combinations(people, 2):
        header.append(lit(NEQ, a, b))
    return conj(*header, rewrite(formula))


# ---------------------------------------------------------------------------
# DNF normalization

DEFAULT_BRANCH_CAP = 64


def normalize(formula: Formula, cap: int = DEFAULT_BRANCH_CAP) -> list[ConjunctiveBranch]:
    """Expand to disjunctive normal form, textual order of disjuncts.

    Raises FormulaError if the expansion would exceed ``cap`` branches.
    """
    branch_sets = _branch_atom_sets(formula)
    if len(branch_sets) > cap:
        raise FormulaError(
            f"{format_formula(formula)}: DNF expansion has {len(branch_sets)} "
            f"branches, above the cap of {cap}")
    branches = []
    for atom_list in branch_sets:
        atoms: list[Atom] = []
        for atom in atom_list:  # drop duplicates, keep first occurrence
            if atom not in atoms:
                atoms.append(atom)
        variables: dict[Var, None] = {}
        for atom in atoms:
            for arg in atom.args:
                if isinstance(arg, Const):
                    raise FormulaError(
                        f"cannot normalize {atom}: run name_to_person first")
                variables.setdefault(arg)
        branches.append(ConjunctiveBranch(list(variables), atoms))
    return branches


def theta_of(branch: ConjunctiveBranch) -> list[tuple[int, ...]]:
    """Argument map: per atom, the variable indices filling its slots."""
    return list(branch.theta)


# ---------------------------------------------------------------------------
# canonical prefix notation

def format_formula(formula: Formula) -> str:
    if isinstance(formula, Lit):
        return str(formula.atom)
    if isinstance(formula, And):
        return "and(%s)" % ", ".join(format_formula(p) for p in formula.parts)
    if isinstance(formula, Or):
        return "or(%s)" % ", ".join(format_formula(p) for p in formula.parts)
    raise FormulaError(f"unknown formula node {formula!r}")


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|[(),])")


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"bad formula syntax near {text[pos:pos + 12]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse_formula(text: str) -> Formula:
    """Parse the canonical prefix notation.

    Lowercase identifiers in argument position are variables, capitalized
    ones are proper-name constants.  Variable sorts are inferred from the
    class atoms of the formula (person(...) makes a variable
    person-sorted, everything else is an object).
    """
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def expect(tok):
        nonlocal pos
        if peek() != tok:
            raise FormulaError(f"expected {tok!r}, found {peek()!r}")
        pos += 1

    def parse_node() -> Formula:
        nonlocal pos
        head = peek()
        if head is None or head in "(),":
            raise FormulaError(f"unexpected token {head!r}")
        pos += 1
        expect("(")
        if head in ("and", "or"):
            parts = [parse_node()]
            while peek() == ",":
                pos += 1
                parts.append(parse_node())
            expect(")")
            return And(tuple(parts)) if head == "and" else Or(tuple(parts))
        args = [parse_term()]
        while peek() == ",":
            pos += 1
            args.append(parse_term())
        expect(")")
        return Lit(Atom(head, tuple(args)))

    def parse_term() -> Term:
        nonlocal pos
        tok = peek()
        if tok is None or tok in "(),":
            raise FormulaError(f"expected a term, found {tok!r}")
        pos += 1
        if tok[0].isupper():
            return Const(tok)
        return Var(tok)  # sort fixed up below

    node = parse_node()
    if pos != len(tokens):
        raise FormulaError(f"trailing tokens after formula: {tokens[pos:]}")

    person_names = {a.args[0].name for a in node.atoms()
                    if a.predicate == "person" and isinstance(a.args[0], Var)}

    def resort(n: Formula) -> Formula:
        if isinstance(n, Lit):
            args = tuple(
                Var(t.name, PERSON_SORT if t.name in person_names else OBJECT_SORT)
                if isinstance(t, Var) else t
                for t in n.atom.args)
            return Lit(Atom(n.atom.predicate, args))
        if isinstance(n, And):
            return And(tuple(resort(p) for p in n.parts))
        return Or(tuple(resort(p) for p in n.parts))

    return resort(node)
