import itertools

import pytest

from teamsem.dependencies import (DependencyError, DependencyRegistry, builtin, check_closed_world,
                                  check_closure, classify, compute_dmax, dep_holds, fo_dependency,
                                  parse_dep_file, relativize_closed_world, relativized_holds)
from teamsem.model import Structure, Team
from teamsem.syntax import to_text
from teamsem.tarski import sentence_holds
from teamsem.verify import enumerate_relations

reg = DependencyRegistry()


def holds(spec, m, tuples):
    return dep_holds(reg.parse_spec(spec), range(m), frozenset(tuples))


def test_constancy_membership():
    assert holds("const/1", 2, {(0,)})
    assert holds("const/1", 2, set())
    assert not holds("const/1", 2, {(0,), (1,)})


def test_functional_dependence():
    assert not holds("dep(1;1)", 2, {(0, 0), (0, 1)})
    assert holds("dep(1;1)", 2, {(0, 1), (1, 1)})


def test_inclusion_on_pairs():
    # (0,1),(1,1): first coordinate 0 never appears as a second coordinate
    assert not holds("incl(1)", 2, {(0, 1), (1, 1)})
    assert holds("incl(1)", 2, {(1, 1), (0, 0), (1, 0)})


def test_independence():
    assert holds("indep(1;1;1)", 2, {(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)})
    # the middle group conditions: given y = 0 the pairs (0,1) and (1,0) are missing
    assert not holds("indep(1;1;1)", 2, {(0, 0, 0), (1, 0, 1)})
    assert holds("indep(1;1;1)", 2, {(0, 0, 0), (1, 1, 1)})


def test_non_totality():
    assert holds("nt", 2, {(0,)})
    assert not holds("nt", 2, {(0,), (1,)})


def _agree(a, b, max_m):
    for m in range(1, max_m + 1):
        for R in enumerate_relations(m, a.arity):
            assert dep_holds(a, range(m), R) == dep_holds(b, range(m), R), (m, R)


def test_first_order_constancy_matches_builtin():
    fo = fo_dependency("fo_const", "A x A y (R(x) & R(y) -> x = y)", 1)
    _agree(fo, builtin("const", (1,)), 3)


def test_first_order_inclusion_matches_builtin():
    fo = fo_dependency("fo_incl", "A x A y (R(x,y) -> E z R(z,x))", 2)
    _agree(fo, builtin("incl", (1, 1)), 2)


def test_defining_sentence_for_const_rejects_two_values():
    dep = builtin("const", (1,))
    assert not sentence_holds(dep.formula, range(2), {"R": frozenset({(0,), (1,)})})


def test_registry_specs():
    assert reg.parse_spec("dep(1;1)").shape == (1, 1)
    assert reg.parse_spec("incl(2)").shape == (2, 2)
    assert reg.parse_spec("cex4").arity == 4
    assert reg.parse_spec("max_const").name == "max_const"
    with pytest.raises(DependencyError):
        reg.parse_spec("nosuch")
    with pytest.raises(DependencyError):
        reg.parse_spec("const(")


def test_registry_rejects_reserved_names():
    with pytest.raises(DependencyError, match="reserved"):
        DependencyRegistry().register(fo_dependency("const", "E x R(x)", 1))


def test_dependency_file():
    text = "# comment\ndep ne 1\nformula E x R(x)\nend\n\ndep pair 2\nformula A x A y (R(x,y) -> R(y,x))\nend\n"
    deps = parse_dep_file(text)
    assert [d.name for d in deps] == ["ne", "pair"]
    assert dep_holds(deps[0], range(2), frozenset({(1,)}))
    assert not dep_holds(deps[0], range(2), frozenset())


@pytest.mark.parametrize("text, line", [
    ("dep ne\nformula E x R(x)\nend\n", 1),
    ("dep ne 1\nend\n", 2),
    ("dep ne 1\nformula E x (R(x)\nend\n", 2),
])
def test_dependency_file_errors_name_the_line(text, line):
    with pytest.raises(DependencyError, match=f"deps.txt:{line}"):
        parse_dep_file(text, "deps.txt")


# Expected closure table at |M| <= 3 (2 for the 4-ary order dependency).
TABLE = {
    "const/1": dict(etp=True, down=True, up=False, union=False, cw=True),
    "dep(1;1)": dict(etp=True, down=True, up=False, union=False, cw=True),
    "incl(1)": dict(etp=True, down=False, up=False, union=True, cw=True),
    "indep(1;1;1)": dict(etp=True, down=False, up=False, union=False, cw=True),
    "nt": dict(etp=True, down=True, up=False, union=False, cw=False),
}


@pytest.mark.parametrize("spec", sorted(TABLE))
def test_classifier(spec):
    got = classify(reg.parse_spec(spec), 3)
    want = TABLE[spec]
    assert got["empty-team"].holds == want["etp"]
    assert got["downwards"].holds == want["down"]
    assert got["upwards"].holds == want["up"]
    assert got["union"].holds == want["union"]
    assert got["closed-world"].holds == want["cw"]


def test_counterexample_witness_is_genuine():
    v = check_closure(reg.parse_spec("const/1"), "union", 2)
    assert not v.holds
    w = v.witness
    dep = reg.parse_spec("const/1")
    m = range(len(w["M"]))
    assert dep_holds(dep, m, w["R1"]) and dep_holds(dep, m, w["R2"])
    assert not dep_holds(dep, m, frozenset(w["R1"]) | frozenset(w["R2"]))


def test_nt_not_closed_world_witness():
    v = check_closed_world(reg.parse_spec("nt"), 3)
    assert not v.holds
    assert v.witness["R"] == frozenset({(0,)})


def test_cex4_classified_at_two():
    got = classify(reg.parse_spec("cex4"), 3)
    assert all(v.bound == 2 for v in got.values())


def test_dmax_const():
    maximal = compute_dmax(reg.parse_spec("const/1"), range(3))
    assert {r.tuples for r in maximal} == {frozenset({(e,)}) for e in range(3)}


def test_dmax_dependency_atom():
    dep = reg.parse_spec("max_const")
    assert dep_holds(dep, range(2), frozenset({(1,)}))
    assert not dep_holds(dep, range(2), frozenset())


def test_every_member_extends_to_a_maximal_one():
    for spec in ("const/1", "dep(1;1)", "nt", "incl(1)"):
        dep = reg.parse_spec(spec)
        for m in (1, 2):
            maximal = [r.tuples for r in compute_dmax(dep, range(m))]
            for R in enumerate_relations(m, dep.arity):
                if dep_holds(dep, range(m), R):
                    assert any(R <= K for K in maximal)


def test_relativized_nt():
    nt = reg.parse_spec("nt")
    M = Structure.canonical(3)
    assert relativized_holds(nt, {0, 1}, M, Team(("t",), [(0,)]), ("t",))
    assert not relativized_holds(nt, {0, 1}, M, Team(("t",), [(0,), (1,)]), ("t",))
    assert not relativized_holds(nt, {0, 1}, M, Team(("t",), [(2,)]), ("t",))


def test_relativize_formula():
    phi = relativize_closed_world(reg.parse_spec("const/1"), "P", ("v",))
    assert to_text(phi) == "P(v) & #const(v)"
    with pytest.raises(DependencyError, match="not closed-world"):
        relativize_closed_world(reg.parse_spec("nt"), "P", ("v",))


def test_declared_flags_agree_with_exhaustive_checks():
    for family, shape in [("const", (1,)), ("dep", (1, 1)), ("incl", (1, 1)), ("nt", (1,)),
                          ("indep", (1, 1, 1))]:
        dep = builtin(family, shape)
        for prop in ("empty-team", "downwards", "upwards", "union"):
            declared = dep.known(prop, None)
            if declared is not None:
                assert check_closure(dep, prop, 2).holds == declared, (family, prop)


def test_guard_on_large_relations():
    with pytest.raises(DependencyError):
        compute_dmax(reg.parse_spec("cex4"), range(3))


def test_arity_products():
    # sanity check on the relation enumerator used throughout
    assert sum(1 for _ in enumerate_relations(2, 2)) == 2 ** 4
    assert len(list(itertools.islice(enumerate_relations(3, 1), 100))) == 8
