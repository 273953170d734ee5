import itertools

import pytest
from hypothesis import given, strategies as st

from teamsem.model import (ModelError, Relation, Structure, Team, duplicate, enumerate_covers,
                           enumerate_lax_supplements, project_team, restrict_team, select_team,
                           supplement)
from teamsem.syntax import parse_classical

M2 = Structure.canonical(2)

# Two-row team and its supplementation function.
TWO_ROW_X = Team(("v0",), [(0,), (1,)])
TWO_ROW_H = {(0,): [(1, 0)], (1,): [(0, 0), (0, 1)]}
TWO_ROW_SUPPLEMENTED = Team(("v0", "v1", "v2"), [(0, 1, 0), (1, 0, 0), (1, 0, 1)])
TWO_ROW_DUPLICATED = Team(("v0", "v1", "v2"), list(itertools.product((0, 1), repeat=3)))

# Three relations encoded in one team.
ENCODED = Team(("v1", "w1", "v2", "v3", "w2", "w3", "v4", "w4"), [
    (0, 0, 0, 1, 0, 1, 0, 1),
    (1, 1, 1, 2, 1, 2, 0, 1),
    (2, 2, 0, 0, 1, 1, 0, 1),
])
M3 = Structure.canonical(3)


def test_two_row_supplement():
    assert supplement(TWO_ROW_X, TWO_ROW_H, ("v1", "v2")) == TWO_ROW_SUPPLEMENTED


def test_two_row_duplicate():
    out = duplicate(TWO_ROW_X, ("v1", "v2"), M2)
    assert out == TWO_ROW_DUPLICATED
    assert len(out) == 8


def test_encoded_selections():
    sel = select_team(ENCODED, parse_classical("v1 = w1"), M3)
    assert project_team(sel, ("v1",)).tuples == {(0,), (1,), (2,)}
    sel = select_team(ENCODED, parse_classical("v2 = w2 & v3 = w3"), M3)
    assert project_team(sel, ("v2", "v3")).tuples == {(0, 1), (1, 2)}
    sel = select_team(ENCODED, parse_classical("v4 = w4"), M3)
    assert project_team(sel, ("v4",)).tuples == frozenset()


def test_team_canonical_order():
    a = Team(("y", "x"), [(1, 0), (0, 1), (1, 0)])
    assert a.vardom == ("x", "y")
    assert a.rows == ((0, 1), (1, 0))
    assert a == Team(("x", "y"), [(1, 0), (0, 1)])


def test_team_errors():
    with pytest.raises(ModelError):
        Team(("x", "x"), [])
    with pytest.raises(ModelError):
        Team(("x",), [(0, 1)])


def test_zero_variable_teams_differ():
    assert Team.unit() != Team.empty()
    assert len(Team.unit()) == 1 and not Team.empty()


def test_project_repeated_variable_is_diagonal():
    X = Team(("x", "y"), [(0, 1), (1, 1)])
    assert project_team(X, ("x", "x")).tuples == {(0, 0), (1, 1)}


def test_project_unknown_variable():
    with pytest.raises(ModelError, match="'z'"):
        project_team(TWO_ROW_X, ("z",))


def test_restrict():
    X = Team(("x", "y"), [(0, 0), (0, 1)])
    assert restrict_team(X, {"x"}) == Team(("x",), [(0,)])
    assert restrict_team(X, {"x", "y"}) == X
    assert restrict_team(X, set()) == Team.unit()
    with pytest.raises(ModelError):
        restrict_team(X, {"z"})


def test_select_true_keeps_all():
    assert select_team(ENCODED, parse_classical("v1 = v1"), M3) == ENCODED


def test_supplement_errors():
    with pytest.raises(ModelError):
        supplement(TWO_ROW_X, {(0,): [(1,)], (1,): []}, ("v1",))
    with pytest.raises(ModelError):
        supplement(TWO_ROW_X, TWO_ROW_H, ("v1", "v1"))


def test_supplement_of_empty_team():
    assert supplement(Team.empty(("x",)), {}, ("y",)) == Team.empty(("x", "y"))


def test_duplicate_overwrites_and_matches_full_supplement():
    X = Team(("x", "y"), [(0, 0), (1, 1)])
    everything = [(0,), (1,)]
    assert duplicate(X, ("x",), M2) == supplement(X, {r: everything for r in X.rows}, ("x",))
    assert duplicate(Team.unit(), ("x",), M2) == Team(("x",), [(0,), (1,)])


@pytest.mark.parametrize("rows, expected", [(0, 1), (1, 3), (2, 9)])
def test_lax_supplement_counts(rows, expected):
    X = Team(("x",), [(i,) for i in range(rows)])
    teams = list(enumerate_lax_supplements(X, ("y",), M2))
    assert len(teams) == expected == len(set(teams))


@pytest.mark.parametrize("rows, expected", [(0, 1), (1, 3), (2, 9), (3, 27)])
def test_cover_counts(rows, expected):
    X = Team(("x",), [(i,) for i in range(rows)])
    covers = list(enumerate_covers(X))
    assert len(covers) == expected
    assert all(y.union(z) == X for y, z in covers)


def test_relation_arity_checked():
    with pytest.raises(ModelError):
        Relation.of(2, [(0,)])


def test_structure_validation():
    with pytest.raises(ModelError):
        Structure(())
    with pytest.raises(ModelError):
        Structure(("a", "a"))
    with pytest.raises(ModelError):
        Structure.canonical(2, {"R": (1, [(5,)])})


teams_xy = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
                    max_size=6).map(lambda rows: Team(("x", "y", "z"), rows))


@given(teams_xy, st.lists(st.sampled_from("xyz"), min_size=1, max_size=3))
def test_project_commutes_with_restrict(X, vs):
    assert project_team(X, vs) == project_team(restrict_team(X, set(vs)), vs)


@given(teams_xy)
def test_lax_supplements_are_restriction_preserving_subteams(X):
    if len(X) > 2:
        X = X.subteam(X.rows[:2])
    full = duplicate(X, ("w",), M2)
    for Y in enumerate_lax_supplements(X, ("w",), M2):
        assert Y.is_subteam(full)
        assert restrict_team(Y, X.vardom) == X
