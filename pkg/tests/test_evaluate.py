import itertools

import pytest
from hypothesis import given, settings, strategies as st

from teamsem.corpus import FormulaGenerator, literals
from teamsem.dependencies import DependencyRegistry, fo_dependency
from teamsem.evaluate import (NAIVE, RULES, EvalConfig, EvaluationError, TeamEvaluator,
                              sentence_true, team_eval)
from teamsem.model import Structure, Team, duplicate, restrict_team
from teamsem.syntax import DepAtom, parse_classical, parse_team
from teamsem.tarski import sentence_holds

M2 = Structure.canonical(2)
R_M2 = Structure.canonical(2, {"R": (2, [(0, 1), (1, 1)])})
X01 = Team(("x",), [(0,), (1,)])


def ev(text, team, structure=M2, **kw):
    return team_eval(structure, team, parse_team(text), **kw)


def test_const_fails_on_two_values():
    assert not ev("#const(x)", X01)


def test_split_by_value():
    assert ev("#const(x) | #const(x)", X01)
    assert not ev("#const(x) | #const(x)", Team(("x",), [(0,), (1,), (2,)]), Structure.canonical(3))


def test_empty_team_satisfies_etp_formulas():
    empty = Team.empty(("x", "y"))
    for text in ["#const(x) & #dep(x;y)", "A z (R(x,z) & #incl(x;y))", "x != x"]:
        assert ev(text, empty, R_M2)


def test_literals_hold_rowwise():
    T = Team(("x", "y"), [(0, 1), (1, 1)])
    assert ev("R(x,y)", T, R_M2)
    assert not ev("R(y,x)", T, R_M2)
    assert ev("!R(x,x) | x = y", T, R_M2)


def test_lax_disjunction_allows_overlap():
    # a dependency without downward closure needs the shared row on both sides
    reg = DependencyRegistry()
    T = Team(("x", "y"), [(0, 0), (0, 1), (1, 0)])
    assert team_eval(M2, T, parse_team("#incl(x;y) | #incl(x;y)", reg), registry=reg)


def test_existential_witness_sets():
    T = Team(("x",), [(0,), (1,)])
    assert ev("E y (#dep(x;y) & x != y)", T)
    assert ev("E y #const(y)", T)
    assert not ev("E y (#const(y) & x = y)", T)


def test_universal_duplicates():
    assert not ev("A y #const(y)", Team.unit())
    assert ev("A y #dep(x;x)", X01)


def test_selective_implication_selects():
    assert ev("x = x ~> #const(x)", Team(("x",), [(0,)]))
    assert ev("x != x ~> #const(x)", X01)
    assert not ev("x = x ~> #const(x)", X01)


def test_boolean_disjunction():
    assert ev("#const(x) ++ x = x", X01)
    assert not ev("#const(x) ++ x != x", X01)


def test_sentence_true_matches_tarski():
    phi = parse_team("A x E y R(x,y)")
    assert sentence_true(R_M2, phi)
    assert sentence_holds(parse_classical("A x E y R(x,y)"), R_M2.elements, R_M2.interpretation())


def test_nested_quantifier_sentence():
    assert sentence_true(M2, parse_team("E x A y (x = y | #dep(y;x))"))


def test_dmax_atom_in_formula():
    assert ev("#max_const(x)", Team(("x",), [(1,)]))
    assert not ev("#max_const(x)", Team.empty(("x",)))


def test_errors():
    with pytest.raises(EvaluationError, match="unbound"):
        ev("#const(z)", X01)
    with pytest.raises(EvaluationError):
        team_eval(M2, X01, DepAtom("nosuch", (("x",),)))
    with pytest.raises(EvaluationError, match="not a sentence"):
        sentence_true(M2, parse_team("x = x"))


def test_partition_needs_downward_closure():
    cfg = EvalConfig(disjunction="partition")
    assert ev("#const(x) | #dep(x;x)", X01, config=cfg)
    with pytest.raises(EvaluationError, match="downwards closed"):
        ev("#incl(x;x) | #const(x)", X01, config=cfg)


def test_user_dependency():
    reg = DependencyRegistry()
    reg.register(fo_dependency("ne", "E x R(x)", 1))
    assert team_eval(M2, X01, parse_team("#ne(x)", reg), registry=reg)
    assert not team_eval(M2, Team.empty(("x",)), parse_team("#ne(x)", reg), registry=reg)


def _check_witnesses(node):
    if node.note == "cover":
        left, right = node.children
        assert left.team.union(right.team) == node.team
    elif node.note and node.note.startswith("supplement of"):
        (child,) = node.children
        assert restrict_team(child.team, node.team.vardom) == node.team
    if node.note in ("cover",) or (node.note or "").startswith("supplement"):
        assert all(c.verdict for c in node.children)
    for c in node.children:
        _check_witnesses(c)


def test_trace_witnesses_are_valid():
    T = Team(("x", "y"), [(0, 0), (0, 1), (1, 0), (1, 1)])
    verdict, trace = ev("E z (#dep(x;z) & (#const(z) | #dep(y;z)))", T, trace=True)
    assert verdict
    _check_witnesses(trace)
    text = trace.render(M2)
    assert "supplement of z" in text and "true" in text


ATOMS = [DepAtom("const", (("x",),)), DepAtom("dep", (("x",), ("y",))),
         DepAtom("incl", (("y",), ("x",))), DepAtom("indep", (("x",), ("y",), ("x",))),
         DepAtom("nt", (("y",),))]
TEAMS = {m: [Team(("x", "y"), rows)
             for n in range(4)
             for rows in itertools.combinations(itertools.product(range(m), repeat=2), n)]
         for m in (1, 2)}
MODELS = [Structure.canonical(1, {"R": (2, [])}),
          Structure.canonical(1, {"R": (2, [(0, 0)])}),
          Structure.canonical(2, {"R": (2, [])}),
          Structure.canonical(2, {"R": (2, [(0, 1), (1, 0)])}),
          Structure.canonical(2, {"R": (2, [(0, 0), (0, 1), (1, 1)])})]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.sampled_from(MODELS))
def test_strategies_agree(seed, depth, M):
    phi = FormulaGenerator(seed, literals({"R": 2}), ATOMS, sugar=True).formula(depth)
    fast = TeamEvaluator(M)
    naive = TeamEvaluator(M, config=NAIVE)
    rules = TeamEvaluator(M, config=RULES)
    dup = TeamEvaluator(M, config=EvalConfig(existential="duplication", flat_shortcut=False))
    for T in TEAMS[M.size]:
        want = naive.holds(phi, T)
        assert fast.holds(phi, T) == want
        assert rules.holds(phi, T) == want
        assert dup.holds(phi, T) == want


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_flatness_property(seed, depth):
    phi = FormulaGenerator(seed, literals({"R": 2})).formula(depth)
    M = Structure.canonical(2, {"R": (2, [(0, 1), (1, 1)])})
    e = TeamEvaluator(M, config=RULES)
    for T in TEAMS[2]:
        assert e.holds(phi, T) == all(e.holds(phi, T.subteam([r])) for r in T.rows)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_locality_property(seed):
    phi = FormulaGenerator(seed, literals({"R": 2}), ATOMS[:3]).formula(3)
    e = TeamEvaluator(R_M2)
    for T in TEAMS[2]:
        padded = duplicate(T, ("u",), R_M2)
        assert e.holds(phi, padded) == e.holds(phi, T)
