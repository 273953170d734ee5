import itertools

import pytest

from teamsem.dependencies import DependencyRegistry, dep_holds, relativized_holds
from teamsem.evaluate import TeamEvaluator, sentence_true
from teamsem.model import Structure, Team
from teamsem.syntax import (BoolDisj, DepAtom, Exists, FAtom, RelLit, count_occurrences, dep_atoms,
                            free_vars, is_first_order, parse_classical, parse_team, split_prefix,
                            to_text, walk)
from teamsem.transforms import (Eq1Case, PutbackGroup, TransformError, assemble_putback,
                                build_dep_union, build_eq1, build_nt_relativized, build_phi_R,
                                build_theta_T, desugar, extract_atoms, put_back_qfree,
                                safety_pipeline, split_occurrences)
from teamsem.verify import enumerate_models, enumerate_relations, enumerate_teams

reg = DependencyRegistry()
CONST = reg.parse_spec("const/1")


def test_desugar_selective_implication():
    out = desugar(parse_team("x = y ~> #const(x)"))
    assert to_text(out) == "x != y | x = y & #const(x)"


def test_desugar_boolean_disjunction():
    out = desugar(parse_team("#const(x) ++ x = x"))
    assert to_text(out) == ("E _z1 E _z2 (#const(_z1) & #const(_z2) & "
                            "(_z1 = _z2 & #const(x) | _z1 != _z2 & x = x))")


def test_desugar_fresh_names_avoid_input():
    out = desugar(BoolDisj(parse_team("_z1 = _z1"), parse_team("x = x")))
    assert isinstance(out, Exists) and out.var not in ("_z1",)


def test_extraction_introduces_fresh_symbols():
    ext = extract_atoms(parse_team("#const(x) | E y #const(y)"), {"const"}, reg)
    assert ext.symbols == ["_S1", "_S2"]
    assert is_first_order(ext.formula)
    assert all(dep is CONST or dep.label == "const/1" for _, dep, _ in ext.bindings)


def test_extraction_needs_downward_closure():
    with pytest.raises(TransformError, match="not downwards closed"):
        extract_atoms(parse_team("#incl(x;y)"), {"incl"}, reg)


def test_split_occurrences():
    chi = parse_classical("A x (S(x) | E y (S(y) & P(x)))")
    out, names = split_occurrences(chi, "S")
    assert len(names) == 2 == len(set(names))
    assert count_occurrences(out, "S") == 0
    assert all(count_occurrences(out, n) == 1 for n in names)


def test_union_formula_single_relation_template():
    out = build_dep_union(CONST, [("v",)], [("w",)])
    assert to_text(out) == ("A _p1 A _q2 E _z3 E _z4 (_q2 = _p1 ~> (_q2 = _p1 ~> _z3 = v & _z4 = w)"
                            " & (_z3 = _z4 ~> #const(_z3)))")
    assert free_vars(out) == {"v", "w"}


def _encoded_union(T, pairs):
    out = set()
    for v, w in pairs:
        out |= {r[T.index(v)] for r in T.rows if r[T.index(v)] == r[T.index(w)]}
    return frozenset((e,) for e in out)


@pytest.mark.parametrize("spec", ["const/1", "nt"])
def test_union_formula_semantics(spec):
    dep = reg.parse_spec(spec)
    phi = build_dep_union(dep, [("v1",), ("v2",)], [("w1",), ("w2",)])
    M = Structure.canonical(2)
    ev = TeamEvaluator(M, reg)
    for T in enumerate_teams(2, ("v1", "v2", "w1", "w2"), 2):
        union = _encoded_union(T, [("v1", "w1"), ("v2", "w2")])
        assert ev.holds(phi, T) == dep_holds(dep, M.elements, union)


def test_qfree_putback_literal():
    out, v, w = put_back_qfree(parse_team("W(x)"), "W", 1)
    assert to_text(out) == f"{v[0]} = {w[0]} & x = {w[0]}"


def test_qfree_putback_rejects_negative():
    with pytest.raises(TransformError):
        put_back_qfree(parse_team("!W(x)"), "W", 1)


def test_sentence_putback_shape():
    out = assemble_putback(parse_classical("E y W(y)"), [PutbackGroup(CONST, ("W",))])
    prefix, matrix = split_prefix(out)
    assert [q for q, _ in prefix[:3]] == ["E", "E", "E"] and prefix[0][1] == "y"
    v, w = prefix[1][1], prefix[2][1]
    assert to_text(matrix.right) == f"{v} = {w} & y = {w}"


def test_sentence_putback_needs_prenex():
    with pytest.raises(TransformError):
        assemble_putback(parse_classical("E y W(y) & A x W(x)"), [PutbackGroup(CONST, ("W",))])


def _equivalent_on_small_models(phi, out, max_size=2):
    for M in enumerate_models(max_size, {"P": 1}):
        assert sentence_true(M, phi, registry=reg) == sentence_true(M, out, registry=reg), M


def test_pipeline_simple():
    phi = parse_team("A x (#const(x) | x = x)")
    out = safety_pipeline(phi, {"const"}, reg)
    assert all(a.name == "const" for a in dep_atoms(out))
    _equivalent_on_small_models(phi, out)


def test_pipeline_with_predicate():
    phi = parse_team("E x (P(x) & A y (#const(y) | !P(y)))")
    _equivalent_on_small_models(phi, safety_pipeline(phi, {"const"}, reg))


def test_pipeline_translation_callback():
    seen = []

    def translate(formula, ext):
        seen.append(ext.symbols)
        return formula

    phi = parse_team("A x #const(x)")
    out = safety_pipeline(phi, {"const"}, reg, fo_translation=translate)
    assert seen == [["_S1"]]
    _equivalent_on_small_models(phi, out)


def test_pipeline_rejects_open_formula():
    with pytest.raises(TransformError, match="not a sentence"):
        safety_pipeline(parse_team("#const(x)"), {"const"}, reg)


def test_phi_R_const_on_empty_relation():
    M = Structure.canonical(2, {"R": (1, [])})
    assert sentence_true(M, build_phi_R(CONST), registry=reg)
    M = Structure.canonical(2, {"R": (1, [(0,)])})
    assert not sentence_true(M, build_phi_R(CONST), registry=reg)


def test_theta_T_const():
    theta = build_theta_T(CONST)
    for T, want in [([], True), ([(1,)], True), ([(0,), (1,)], False)]:
        M = Structure.canonical(2, {"T": (1, T)})
        assert sentence_true(M, theta, registry=reg) == want


def test_eq1_constancy_text():
    phi = build_eq1(CONST, [Eq1Case(parse_classical("x = z"), ("x",), ("z",))], ("v",))
    assert to_text(phi) == "E z (#const(z) & A x1 A y1 (x1 != z | y1 != z | x1 = y1) & v = z)"


def test_eq1_constancy_equivalence_and_empty_teams():
    phi = build_eq1(CONST, [Eq1Case(parse_classical("x = z"), ("x",), ("z",))], ("v",))
    atom = DepAtom("const", (("v",),))
    for m in (1, 2, 3):
        ev = TeamEvaluator(Structure.canonical(m), reg)
        teams = list(enumerate_teams(m, ("v",), m)) + [Team(("u", "v"))]
        for T in teams:
            assert ev.holds(phi, T) == ev.holds(atom, T)
    assert TeamEvaluator(Structure.canonical(2), reg).holds(phi, Team.empty(("v",)))


def test_eq1_no_cases_is_false_atom():
    out = build_eq1(CONST, [], ("v",))
    assert out == DepAtom("false", (("v",),))


def test_nt_relativized_example():
    phi = build_nt_relativized()
    M = Structure.canonical(3, predicates={"P": {0, 1}})
    ev = TeamEvaluator(M, reg)
    nt = reg.parse_spec("nt")
    for values, want in [({0}, True), ({0, 1}, False)]:
        T = Team(("t",), [(e,) for e in values])
        assert ev.holds(phi, T) == want == relativized_holds(nt, {0, 1}, M, T, ("t",))


def test_relation_symbols_untouched_by_desugar():
    phi = parse_team("P(x) ~> (R(x,x) ++ #const(x))")
    out = desugar(phi)
    assert {n.sym for n in _rel_leaves(out)} == {"P", "R"}


def _rel_leaves(phi):
    return [n for n in walk(phi) if isinstance(n, (RelLit, FAtom))]


def test_enumerators_used_by_sweeps():
    assert len(list(enumerate_relations(2, 1))) == 4
    assert len(list(itertools.islice(enumerate_teams(2, ("v",), 2), 10))) == 4
