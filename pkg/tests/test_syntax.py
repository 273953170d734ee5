import random

import pytest
from hypothesis import given, settings, strategies as st

from teamsem.corpus import FormulaGenerator, literals, random_sentence
from teamsem.dependencies import DependencyRegistry
from teamsem.model import Structure
from teamsem.syntax import (And, DepAtom, EqLit, Exists, FAtom, FEq, FExists, FForall, FNot,
                            FormulaError, FreshNames, Or, RelLit, SelImp, check_positive,
                            count_occurrences, free_vars, is_prenex, parse_classical, parse_team,
                            rename_bound_apart, rename_free, split_prefix, substitute_relation,
                            to_classical, to_nnf, to_prenex, to_text)
from teamsem.tarski import sentence_holds, tarski_eval
from teamsem.verify import enumerate_models


def test_parse_team_shapes():
    phi = parse_team("A x E y (#dep(x;y) & (R(x,y) | x != y))")
    assert to_text(phi) == "A x E y (#dep(x;y) & (R(x,y) | x != y))"
    atom = phi.body.body.left
    assert isinstance(atom, DepAtom)
    assert atom.shape == (1, 1) and atom.args == ("x", "y")


def test_precedence_and_over_or():
    phi = parse_team("P(x) | P(y) & x = y")
    assert isinstance(phi, Or) and isinstance(phi.right, And)


def test_selective_implication_parses():
    phi = parse_team("x = y | P(x) ~> #const(x)")
    assert isinstance(phi, SelImp)
    assert phi.cond == parse_classical("x = y | P(x)")


def test_negated_dependency_rejected():
    with pytest.raises(FormulaError, match="negated dependency atom"):
        parse_team("!#incl(x;y)")


@pytest.mark.parametrize("text", ["A x (P(x)", "P(x) &", "E (P(x))", "x = ", "P(x) $ P(y)"])
def test_syntax_errors_carry_position(text):
    with pytest.raises(FormulaError) as info:
        parse_team(text)
    assert info.value.pos is not None
    assert "line 1" in str(info.value)


def test_error_position_on_second_line():
    with pytest.raises(FormulaError) as info:
        parse_team("A x\n  (P(x) & )")
    assert info.value.pos[0] == 2


def test_mode_specific_errors():
    with pytest.raises(FormulaError):
        parse_team("P(x) -> P(y)")
    with pytest.raises(FormulaError):
        parse_classical("#const(x)")
    with pytest.raises(FormulaError):
        parse_classical("P(x) ~> P(y)")


def test_arity_clash():
    with pytest.raises(FormulaError):
        parse_team("R(x) & R(x,y)")


def test_registry_resolves_at_parse_time():
    reg = DependencyRegistry()
    parse_team("#indep(x;y;z)", reg)
    with pytest.raises(FormulaError, match="unknown dependency"):
        parse_team("#nosuch(x)", reg)


def test_free_vars():
    assert free_vars(parse_team("E y (R(x,y) & #const(z))")) == {"x", "z"}
    assert free_vars(parse_team("x = y ~> P(w)")) == {"x", "y", "w"}


def test_nnf_pushes_negation():
    phi = parse_classical("~(A x P(x) -> E y ~P(y))")
    assert to_text(to_nnf(phi)) == "A x P(x) & A y P(y)"


def test_prenex_renames_apart():
    phi = parse_classical("A x P(x) | E x ~P(x)")
    out = to_prenex(phi)
    assert is_prenex(out)
    prefix, _ = split_prefix(out)
    assert [q for q, _ in prefix] == ["A", "E"]
    assert len({v for _, v in prefix}) == 2


def test_prenex_rejects_dependency_atoms():
    with pytest.raises(FormulaError):
        to_prenex(parse_team("E x #const(x)"))


def test_rename_free_avoids_capture():
    phi = parse_classical("E y R(x,y)")
    out = rename_free(phi, {"x": "y"})
    assert isinstance(out, FExists) and out.var != "y"
    assert free_vars(out) == {"y"}


def test_rename_bound_apart():
    out = rename_bound_apart(parse_classical("E x P(x)"), {"x"})
    assert out.var != "x" and free_vars(out) == frozenset()


def test_substitute_constancy_sentence():
    # constancy's sentence with R(x) replaced by x = z is valid for every z
    phi = parse_classical("A x A y (R(x) & R(y) -> x = y)")
    out = substitute_relation(phi, "R", parse_classical("x = z"), ("x",))
    assert free_vars(out) == {"z"}
    for size in (1, 2, 3):
        M = Structure.canonical(size)
        assert all(tarski_eval(M, {"z": e}, out) for e in M.elements)


def test_substitute_avoids_capture():
    # theta mentions a free z that a quantifier in phi also binds
    phi = parse_classical("E z R(z)")
    out = substitute_relation(phi, "R", parse_classical("x != z"), ("x",))
    assert free_vars(out) == {"z"}
    M = Structure.canonical(2)
    assert tarski_eval(M, {"z": 0}, out)


def test_polarity():
    phi = parse_classical("A x (S(x) | ~(E y ~S(y)))")
    assert check_positive(phi, "S")
    assert not check_positive(parse_classical("S(x) -> P(x)"), "S")
    assert not check_positive(parse_team("S(x) ~> P(x)"), "S")
    assert count_occurrences(phi, "S") == 2


def test_fresh_names_skip_used():
    fresh = FreshNames({"_v1", "_v2"})
    assert fresh("v") == "_v3"
    assert fresh.many("w", 2) == ("_w4", "_w5")


def test_to_classical_roundtrip():
    phi = parse_team("A x (P(x) | x != y)")
    assert to_nnf(to_classical(phi)) == phi


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 4))
def test_print_parse_roundtrip(seed, depth):
    gen = FormulaGenerator(seed, literals({"R": 2, "P": 1}),
                           [DepAtom("dep", (("x",), ("y",))), DepAtom("const", (("y",),))],
                           sugar=True)
    phi = gen.formula(depth)
    assert parse_team(to_text(phi)) == phi


MODELS = list(enumerate_models(2, {"P": 1}))


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_prenex_and_nnf_preserve_truth(seed):
    phi = random_sentence(random.Random(seed), 3, ["P"])
    pre = to_prenex(phi)
    assert is_prenex(pre)
    for M in MODELS:
        interp = M.interpretation()
        expected = sentence_holds(phi, M.elements, interp)
        assert sentence_holds(pre, M.elements, interp) == expected
        assert sentence_holds(to_classical(to_nnf(phi)), M.elements, interp) == expected


def test_node_constructors_are_hashable():
    a = Exists("x", RelLit("P", ("x",)))
    assert hash(a) == hash(Exists("x", RelLit("P", ("x",))))
    assert FNot(FEq("x", "y")) != FEq("x", "y")
    assert EqLit("x", "y") != EqLit("x", "y", False)
    assert FForall("x", FAtom("P", ("x",))) == parse_classical("A x P(x)")
