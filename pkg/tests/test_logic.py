import itertools

import pytest

from disambig.logic import (
    And,
    Atom,
    Const,
    ConjunctiveBranch,
    FormulaError,
    Lit,
    Or,
    Var,
    conj,
    disj,
    format_formula,
    lit,
    name_to_person,
    normalize,
    parse_formula,
    theta_of,
    validate,
)

P = lambda n: Var(n, "person")
O = lambda n: Var(n, "object")


def truth_table_dnf_equivalent(formula, branches):
    """Brute-force oracle: the or-of-branches must match the formula on
    every truth assignment of its atoms."""
    atoms = []
    for a in formula.atoms():
        if a not in atoms:
            atoms.append(a)

    def eval_node(node, assignment):
        if isinstance(node, Lit):
            return assignment[node.atom]
        vals = [eval_node(p, assignment) for p in node.parts]
        return all(vals) if isinstance(node, And) else any(vals)

    for values in itertools.product([False, True], repeat=len(atoms)):
        assignment = dict(zip(atoms, values))
        lhs = eval_node(formula, assignment)
        rhs = any(all(assignment[a] for a in b.atoms) for b in branches)
        if lhs != rhs:
            return False
    return True


def table2_distinct_reading():
    # "Claire and Bill moved a chair", different chairs
    x, y = O("x"), O("y")
    return conj(
        lit("chair", x), lit("chair", y),
        lit("move", Const("Claire"), x),
        lit("move", Const("Bill"), y),
        lit("neq", x, y),
    )


class TestValidate:
    def test_distinct_chairs_reading_ok(self):
        assert validate(name_to_person(table2_distinct_reading())) == []

    def test_missing_patient_is_arity_error(self):
        f = conj(lit("person", P("u")), lit("hold", P("u")))
        assert any("arity" in e for e in validate(f))

    def test_unbound_variable(self):
        f = conj(lit("chair", O("x")), lit("move", P("u"), O("x")))
        errs = validate(f)
        assert any("no class atom" in e for e in errs)

    def test_sort_violation(self):
        f = conj(lit("chair", O("x")), lit("chair", O("y")),
                 lit("move", O("x"), O("y")))
        assert any("person-sorted" in e for e in validate(f))

    def test_neq_same_term(self):
        x = O("x")
        f = conj(lit("chair", x), lit("neq", x, x))
        assert any("distinct" in e for e in validate(f))


class TestNameToPerson:
    def test_two_names_get_person_vars_and_neq(self):
        x = O("x")
        f = conj(lit("chair", x),
                 lit("move", Const("Claire"), x),
                 lit("move", Const("Bill"), x))
        g = name_to_person(f)
        preds = [a.predicate for a in g.atoms()]
        assert preds.count("person") == 2
        assert preds.count("neq") == 1
        assert not g.constants()
        assert validate(g) == []

    def test_idempotent(self):
        f = conj(lit("chair", O("x")), lit("move", Const("Sam"), O("x")))
        once = name_to_person(f)
        assert format_formula(name_to_person(once)) == format_formula(once)

    def test_no_names_unchanged(self):
        f = conj(lit("person", P("u")), lit("chair", O("x")),
                 lit("hold", P("u"), O("x")))
        assert name_to_person(f) is f

    def test_repeated_name_shares_variable(self):
        f = conj(lit("chair", O("x")), lit("chair", O("y")),
                 lit("move", Const("Sam"), O("x")),
                 lit("move", Const("Sam"), O("y")))
        g = name_to_person(f)
        preds = [a.predicate for a in g.atoms()]
        assert preds.count("person") == 1
        assert preds.count("neq") == 0


class TestNormalize:
    def test_pure_conjunction_single_branch(self):
        f = name_to_person(table2_distinct_reading())
        branches = normalize(f)
        assert len(branches) == 1
        assert branches[0].atoms == f.atoms()

    def test_or_and_reading_two_branches(self):
        # "held the chair or the bag and the telescope", right-bracketed
        u, x, y, z = P("u"), O("x"), O("y"), O("z")
        f = conj(
            lit("person", u),
            disj(
                conj(lit("chair", x), lit("hold", u, x)),
                conj(lit("bag", y), lit("telescope", z),
                     lit("hold", u, y), lit("hold", u, z)),
            ),
        )
        branches = normalize(f)
        assert len(branches) == 2
        assert truth_table_dnf_equivalent(f, branches)
        # textual order: the chair branch comes first
        assert any(a.predicate == "chair" for a in branches[0].atoms)

    def test_two_binary_disjunctions_give_four_branches(self):
        a, b, c, d = (lit("chair", O("x")), lit("bag", O("x")),
                      lit("yellow", O("x")), lit("green", O("x")))
        f = conj(disj(a, b), disj(c, d))
        branches = normalize(f)
        assert len(branches) == 4
        expected = [["chair", "yellow"], ["chair", "green"],
                    ["bag", "yellow"], ["bag", "green"]]
        got = [[at.predicate for at in br.atoms] for br in branches]
        assert got == expected
        assert truth_table_dnf_equivalent(f, branches)

    def test_branch_cap(self):
        parts = [disj(lit("yellow", O(f"x{i}")), lit("green", O(f"x{i}")))
                 for i in range(8)]
        with pytest.raises(FormulaError):
            normalize(conj(*parts), cap=64)

    def test_constants_rejected(self):
        with pytest.raises(FormulaError):
            normalize(conj(lit("chair", O("x")),
                           lit("move", Const("Sam"), O("x"))))


class TestTheta:
    def test_binary_readoff(self):
        u, x = P("u"), O("x")
        br = ConjunctiveBranch([u, x], [Atom("hold", (u, x))])
        assert theta_of(br) == [(0, 1)]

    def test_unary(self):
        u = P("u")
        br = normalize(lit("person", u))[0]
        assert theta_of(br) == [(0,)]

    def test_neq_maps_to_chair_variables(self):
        f = name_to_person(table2_distinct_reading())
        br = normalize(f)[0]
        for atom, slots in zip(br.atoms, br.theta):
            if atom.is_neq and all(br.variables[i].sort == "object" for i in slots):
                chair_vars = {a.args[0] for a in br.atoms if a.predicate == "chair"}
                assert {br.variables[i] for i in slots} == chair_vars
                break
        else:
            pytest.fail("no object-sorted neq atom found")

    def test_round_trip(self):
        f = name_to_person(table2_distinct_reading())
        br = normalize(f)[0]
        assert br.rebuild_atoms() == br.atoms


class TestSerialization:
    def test_round_trip(self):
        f = name_to_person(table2_distinct_reading())
        text = format_formula(f)
        g = parse_formula(text)
        assert format_formula(g) == text
        assert validate(g) == []

    def test_constants_preserved(self):
        f = parse_formula("and(chair(x), move(Claire,x), move(Bill,x))")
        assert {c.name for c in f.constants()} == {"Claire", "Bill"}

    def test_sorts_inferred(self):
        f = parse_formula("and(person(u), chair(x), hold(u,x))")
        sorts = {v.name: v.sort for v in f.variables()}
        assert sorts == {"u": "person", "x": "object"}

    def test_syntax_error(self):
        with pytest.raises(FormulaError):
            parse_formula("and(chair(x), ")
