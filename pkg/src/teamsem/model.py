"""Finite structures, teams and the team operations.

Elements are stored as integer indices into the structure's domain; the
domain keeps the human-readable names for I/O.  A team is a canonical
(sorted) set of rows over a sorted tuple of variables, so two equal teams
are equal as Python values and can key memo tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

Element = int
Row = tuple[Element, ...]


class ModelError(ValueError):
    """Raised for malformed structures, teams or team operations."""


@dataclass(frozen=True)
class Relation:
    """A set of element tuples of a fixed arity."""

    arity: int
    tuples: frozenset

    def __post_init__(self):
        for t in self.tuples:
            if len(t) != self.arity:
                raise ModelError(f"tuple {t} does not have arity {self.arity}")

    @classmethod
    def of(cls, arity: int, tuples: Iterable[Sequence[Element]]) -> "Relation":
        return cls(arity, frozenset(tuple(t) for t in tuples))

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(sorted(self.tuples))

    def __contains__(self, item):
        return tuple(item) in self.tuples

    def __le__(self, other: "Relation") -> bool:
        return self.tuples <= other.tuples

    def __lt__(self, other: "Relation") -> bool:
        return self.tuples < other.tuples

    def union(self, other: "Relation") -> "Relation":
        if other.arity != self.arity:
            raise ModelError("union of relations of different arity")
        return Relation(self.arity, self.tuples | other.tuples)

    def active_domain(self) -> frozenset:
        return frozenset(e for t in self.tuples for e in t)

    def sorted(self) -> list[Row]:
        return sorted(self.tuples)


@dataclass(frozen=True)
class Structure:
    """A finite relational structure.

    ``relations`` maps a symbol to ``(arity, frozenset of tuples)``;
    ``predicates`` maps a unary symbol to a frozenset of elements.  Both
    are looked up by :meth:`lookup`, so a literal ``P(x)`` works for either.
    """

    domain: tuple[str, ...]
    relations: Mapping[str, tuple[int, frozenset]] = field(default_factory=dict)
    predicates: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if not self.domain:
            raise ModelError("domain must be nonempty")
        if len(set(self.domain)) != len(self.domain):
            raise ModelError("domain element names must be unique")
        n = len(self.domain)
        for sym, (arity, tuples) in self.relations.items():
            for t in tuples:
                if len(t) != arity:
                    raise ModelError(f"relation {sym}: tuple {t} has wrong arity")
                if any(not 0 <= e < n for e in t):
                    raise ModelError(f"relation {sym}: tuple {t} outside domain")
        for sym, elems in self.predicates.items():
            if sym in self.relations:
                raise ModelError(f"symbol {sym} is both a relation and a predicate")
            if any(not 0 <= e < n for e in elems):
                raise ModelError(f"predicate {sym} mentions an element outside domain")

    @classmethod
    def canonical(cls, size: int, relations=None, predicates=None) -> "Structure":
        """Structure over the domain ``0 .. size-1``."""
        rels = {s: (a, frozenset(map(tuple, ts))) for s, (a, ts) in (relations or {}).items()}
        preds = {s: frozenset(es) for s, es in (predicates or {}).items()}
        return cls(tuple(str(i) for i in range(size)), rels, preds)

    @property
    def size(self) -> int:
        return len(self.domain)

    @property
    def elements(self) -> range:
        return range(len(self.domain))

    def element(self, name: str) -> Element:
        try:
            return self.domain.index(name)
        except ValueError:
            raise ModelError(f"unknown element {name!r}") from None

    def name(self, e: Element) -> str:
        return self.domain[e]

    def signature(self) -> dict[str, int]:
        sig = {s: a for s, (a, _) in self.relations.items()}
        sig.update({s: 1 for s in self.predicates})
        return sig

    def arity(self, sym: str) -> int:
        if sym in self.relations:
            return self.relations[sym][0]
        if sym in self.predicates:
            return 1
        raise ModelError(f"unknown relation symbol {sym!r}")

    def lookup(self, sym: str) -> frozenset:
        """The interpretation of ``sym`` as a set of tuples."""
        if sym in self.relations:
            return self.relations[sym][1]
        if sym in self.predicates:
            return frozenset((e,) for e in self.predicates[sym])
        raise ModelError(f"unknown relation symbol {sym!r}")

    def interpretation(self) -> dict[str, frozenset]:
        interp = {s: ts for s, (_, ts) in self.relations.items()}
        interp.update({s: frozenset((e,) for e in es) for s, es in self.predicates.items()})
        return interp

    def with_relation(self, sym: str, arity: int, tuples: Iterable[Row]) -> "Structure":
        """Copy of the structure with ``sym`` (re)interpreted; ``M[Q/R]``."""
        rels = dict(self.relations)
        preds = dict(self.predicates)
        preds.pop(sym, None)
        rels[sym] = (arity, frozenset(map(tuple, tuples)))
        return Structure(self.domain, rels, preds)

    def __hash__(self):
        return hash((self.domain, tuple(sorted(self.relations.items())),
                     tuple(sorted(self.predicates.items()))))

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (self.domain == other.domain and dict(self.relations) == dict(other.relations)
                and dict(self.predicates) == dict(other.predicates))


class Team:
    """A finite set of assignments over a common variable domain.

    ``vardom`` is kept sorted and ``rows`` sorted and duplicate-free; a row
    holds the values of the variables in ``vardom`` order.  The zero-variable
    teams are ``Team((), ())`` (the empty team) and ``Team((), ((),))``
    (the team ``{ε}``).
    """

    __slots__ = ("vardom", "rows", "_hash", "_index")

    def __init__(self, vardom: Iterable[str], rows: Iterable[Sequence[Element]] = ()):
        vardom = tuple(vardom)
        if len(set(vardom)) != len(vardom):
            raise ModelError(f"duplicate variables in team domain {vardom}")
        order = sorted(range(len(vardom)), key=vardom.__getitem__)
        canon = set()
        for r in rows:
            r = tuple(r)
            if len(r) != len(vardom):
                raise ModelError(f"row {r} does not match variables {vardom}")
            canon.add(tuple(r[i] for i in order))
        self.vardom = tuple(vardom[i] for i in order)
        self.rows = tuple(sorted(canon))
        self._hash = None
        self._index = None

    @classmethod
    def _raw(cls, vardom: tuple, rows: tuple) -> "Team":
        t = cls.__new__(cls)
        t.vardom = vardom
        t.rows = rows
        t._hash = None
        t._index = None
        return t

    @classmethod
    def empty(cls, vardom: Iterable[str] = ()) -> "Team":
        return cls(vardom, ())

    @classmethod
    def unit(cls) -> "Team":
        """The team ``{ε}`` holding only the empty assignment."""
        return cls._raw((), ((),))

    @classmethod
    def from_assignments(cls, vardom: Iterable[str], assignments: Iterable[Mapping[str, Element]]) -> "Team":
        vardom = tuple(vardom)
        rows = []
        for s in assignments:
            if set(s) != set(vardom):
                raise ModelError(f"assignment {dict(s)} does not bind exactly {vardom}")
            rows.append(tuple(s[v] for v in vardom))
        return cls(vardom, rows)

    def __len__(self):
        return len(self.rows)

    def __bool__(self):
        return bool(self.rows)

    def __iter__(self) -> Iterator[dict[str, Element]]:
        for r in self.rows:
            yield dict(zip(self.vardom, r))

    def __eq__(self, other):
        if not isinstance(other, Team):
            return NotImplemented
        return self.vardom == other.vardom and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vardom, self.rows))
        return self._hash

    def __repr__(self):
        return f"Team({self.vardom!r}, {list(self.rows)!r})"

    def index(self, var: str) -> int:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.vardom)}
        try:
            return self._index[var]
        except KeyError:
            raise ModelError(f"variable {var!r} not in team domain {self.vardom}") from None

    def column(self, var: str) -> frozenset:
        i = self.index(var)
        return frozenset(r[i] for r in self.rows)

    def subteam(self, rows: Iterable[Row]) -> "Team":
        """Team over the same variables holding the given (existing) rows."""
        return Team._raw(self.vardom, tuple(sorted(set(rows))))

    def is_subteam(self, other: "Team") -> bool:
        return self.vardom == other.vardom and set(self.rows) <= set(other.rows)

    def union(self, other: "Team") -> "Team":
        if self.vardom != other.vardom:
            raise ModelError("union of teams over different variables")
        return Team._raw(self.vardom, tuple(sorted(set(self.rows) | set(other.rows))))


# -- team operations ---------------------------------------------------------

def project_team(team: Team, variables: Sequence[str]) -> Relation:
    """The relation ``X(v)``; variables may repeat."""
    idx = [team.index(v) for v in variables]
    return Relation(len(idx), frozenset(tuple(r[i] for i in idx) for r in team.rows))


def restrict_team(team: Team, variables: Iterable[str]) -> Team:
    """``X|V``: restrict every assignment to ``V`` and deduplicate."""
    keep = sorted(set(variables))
    for v in keep:
        if v not in team.vardom:
            raise ModelError(f"cannot restrict to {v!r}: not in team domain {team.vardom}")
    if tuple(keep) == team.vardom:
        return team
    idx = [team.index(v) for v in keep]
    return Team._raw(tuple(keep), tuple(sorted({tuple(r[i] for i in idx) for r in team.rows})))


def select_team(team: Team, theta, structure: Structure) -> Team:
    """``X↾θ``: the rows satisfying the first order formula ``theta``."""
    from .tarski import row_predicate

    keep = row_predicate(structure, theta, team.vardom)
    return Team._raw(team.vardom, tuple(r for r in team.rows if keep(r)))


def _check_distinct(variables: Sequence[str]) -> tuple[str, ...]:
    variables = tuple(variables)
    if len(set(variables)) != len(variables):
        raise ModelError(f"supplemented variables must be pairwise distinct: {variables}")
    return variables


def _extend(team: Team, variables: tuple[str, ...]):
    """New vardom plus a function building a new row from (old row, values)."""
    old = team.vardom
    new_vardom = tuple(sorted(set(old) | set(variables)))
    pos = {v: i for i, v in enumerate(new_vardom)}
    src_old = [(pos[v], i) for i, v in enumerate(old) if v not in variables]
    src_new = [(pos[v], j) for j, v in enumerate(variables)]
    width = len(new_vardom)

    def build(row: Row, values: Row) -> Row:
        out = [None] * width
        for p, i in src_old:
            out[p] = row[i]
        for p, j in src_new:
            out[p] = values[j]
        return tuple(out)

    return new_vardom, build


def supplement(team: Team, choice: Mapping[Row, Iterable[Row]] | Callable[[Row], Iterable[Row]],
               variables: Sequence[str]) -> Team:
    """Lax supplementation ``X[H/v]``.

    ``choice`` maps each row of ``team`` (as a tuple in vardom order) to a
    nonempty set of value tuples for ``variables``.
    """
    variables = _check_distinct(variables)
    k = len(variables)
    get = choice if callable(choice) else choice.__getitem__
    if not callable(choice):
        missing = [r for r in team.rows if r not in choice]
        extra = [r for r in choice if r not in set(team.rows)]
        if missing or extra:
            raise ModelError("supplement function must be defined on exactly the rows of the team")
    new_vardom, build = _extend(team, variables)
    rows = set()
    for r in team.rows:
        values = [tuple(m) for m in get(r)]
        if not values:
            raise ModelError(f"supplement function is empty on row {r}")
        for m in values:
            if len(m) != k:
                raise ModelError(f"value tuple {m} does not have length {k}")
            rows.add(build(r, m))
    return Team._raw(new_vardom, tuple(sorted(rows)))


def duplicate(team: Team, variables: Sequence[str], structure: Structure | int) -> Team:
    """Duplication ``X[M/v]``: every value tuple for every row."""
    variables = _check_distinct(variables)
    size = structure if isinstance(structure, int) else structure.size
    values = list(itertools.product(range(size), repeat=len(variables)))
    new_vardom, build = _extend(team, variables)
    rows = {build(r, m) for r in team.rows for m in values}
    return Team._raw(new_vardom, tuple(sorted(rows)))


def nonempty_subsets(items: Sequence) -> Iterator[tuple]:
    """Nonempty subsets in bitmask order."""
    n = len(items)
    for mask in range(1, 1 << n):
        yield tuple(items[i] for i in range(n) if mask >> i & 1)


def enumerate_lax_supplements(team: Team, variables: Sequence[str], structure: Structure | int) -> Iterator[Team]:
    """Every ``X[H/v]`` over all admissible ``H``, in a deterministic order.

    When ``variables`` are fresh, distinct ``H`` give distinct teams and the
    count is ``prod_s (2^(|M|^k) - 1)``; otherwise repeats are skipped.
    """
    variables = _check_distinct(variables)
    size = structure if isinstance(structure, int) else structure.size
    values = list(itertools.product(range(size), repeat=len(variables)))
    options = list(nonempty_subsets(values))
    fresh = not set(variables) & set(team.vardom)
    seen = set()
    for picks in itertools.product(options, repeat=len(team.rows)):
        h = dict(zip(team.rows, picks))
        out = supplement(team, h, variables)
        if not fresh:
            if out in seen:
                continue
            seen.add(out)
        yield out


def enumerate_covers(team: Team) -> Iterator[tuple[Team, Team]]:
    """All pairs ``(Y, Z)`` with ``Y ∪ Z = X``: each row goes left, right or both."""
    rows = team.rows
    for labels in itertools.product((0, 1, 2), repeat=len(rows)):
        left = tuple(r for r, lab in zip(rows, labels) if lab != 1)
        right = tuple(r for r, lab in zip(rows, labels) if lab != 0)
        yield Team._raw(team.vardom, left), Team._raw(team.vardom, right)
