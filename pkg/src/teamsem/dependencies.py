"""Dependency notions as semantic objects.

A dependency is a class of pairs (element set, relation) closed under
isomorphism, given here by a membership test.  The builtins cover constancy,
functional dependence, independence, inclusion, non-totality, the 4-ary
"no maximal extension" example and the trivially false dependency; users add
first order dependencies through a defining sentence over ``R``.

Closure properties are checked by exhaustive enumeration over canonical
domains ``{0..m-1}`` and cached on the dependency together with the bound
they were verified at.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .model import Relation, Structure, Team, project_team
from .syntax import (Classical, DepAtom, FormulaError, parse_classical, relation_symbols,
                     to_text)
from .tarski import EvaluationError, sentence_holds

PROPERTIES = ("empty-team", "downwards", "upwards", "union")
ALL_PROPERTIES = PROPERTIES + ("closed-world",)
MAX_CELLS = 16  # guard on m**k for exhaustive relation enumeration


class DependencyError(ValueError):
    """Unknown dependency, bad shape, or an infeasible exhaustive check."""


@dataclass(eq=False)
class Dependency:
    """A named dependency of a fixed group shape.

    ``test(elements, tuples)`` decides membership of the pair; ``flags`` maps
    a property name to ``(verdict, bound)`` where ``bound is None`` marks a
    property known for every domain size.
    """

    name: str
    shape: tuple[int, ...]
    test: Callable[[frozenset, frozenset], bool]
    label: str = ""
    formula: Classical | None = None
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.shape = tuple(self.shape)
        if not self.label:
            self.label = f"{self.name}/{self.arity}"
        self._tables = {}

    @property
    def arity(self) -> int:
        return sum(self.shape)

    def __repr__(self):
        return f"Dependency({self.label})"

    def holds(self, elements: Iterable, relation) -> bool:
        return dep_holds(self, elements, relation)

    def atom(self, variables) -> DepAtom:
        """Dependency atom on a flat variable tuple, grouped by the shape."""
        variables = tuple(variables)
        if len(variables) != self.arity:
            raise DependencyError(f"{self.label} takes {self.arity} variables, got {len(variables)}")
        groups, i = [], 0
        for size in self.shape:
            groups.append(variables[i:i + size])
            i += size
        return DepAtom(self.name, tuple(groups))

    def known(self, prop: str, size: int | None = None) -> bool | None:
        """Cached verdict for ``prop`` valid at domain size ``size``, if any.

        A positive verdict verified up to bound ``m`` is valid for sizes
        ``<= m``; a negative verdict (witness found) is valid at every larger
        size only in the sense that the property fails somewhere, so it is
        reported whenever no size is asked for.
        """
        entry = self.flags.get(prop)
        if entry is None:
            return None
        verdict, bound = entry
        if bound is None:
            return verdict
        if size is None:
            return verdict if not verdict else None
        if verdict and size <= bound:
            return True
        return None

    def record(self, prop: str, verdict: bool, bound: int):
        old = self.flags.get(prop)
        if old is not None and old[1] is None:
            return
        if not verdict:
            self.flags[prop] = (False, bound)
        elif old is None or (old[0] and old[1] < bound):
            self.flags[prop] = (True, bound)

    def has(self, prop: str, size: int) -> bool:
        """Whether ``prop`` is known at domain size ``size``, verifying lazily.

        Lazy verification is only attempted when enumeration is feasible;
        otherwise the property is treated as unknown (False).
        """
        known = self.known(prop, size)
        if known is not None:
            return known
        if size ** self.arity > MAX_CELLS:
            return False
        if prop == "closed-world":
            return check_closed_world(self, size).holds
        return check_closure(self, prop, size).holds


# -- membership ----------------------------------------------------------------

def _tuples(relation) -> frozenset:
    if isinstance(relation, Relation):
        return relation.tuples
    return frozenset(tuple(t) for t in relation)


def _elements(m) -> frozenset:
    if isinstance(m, Structure):
        return frozenset(m.elements)
    if isinstance(m, int):
        return frozenset(range(m))
    return frozenset(m)


def dep_holds(dep: Dependency, elements, relation) -> bool:
    """Whether ``(elements, relation)`` belongs to ``dep``."""
    tuples = _tuples(relation)
    if isinstance(relation, Relation) and relation.arity != dep.arity:
        raise DependencyError(f"{dep.label} has arity {dep.arity}, relation has {relation.arity}")
    for t in tuples:
        if len(t) != dep.arity:
            raise DependencyError(f"{dep.label} has arity {dep.arity}, got tuple {t}")
    return bool(dep.test(_elements(elements), tuples))


def _const_test(elements, tuples):
    return len(tuples) <= 1


def _fdep_test(j):
    def test(elements, tuples):
        seen = {}
        for t in tuples:
            key, val = t[:j], t[j:]
            if seen.setdefault(key, val) != val:
                return False
        return True
    return test


def _indep_test(a, b):
    def test(elements, tuples):
        groups = {}
        for t in tuples:
            x, y, z = t[:a], t[a:a + b], t[a + b:]
            xs, zs, pairs = groups.setdefault(y, (set(), set(), set()))
            xs.add(x)
            zs.add(z)
            pairs.add((x, z))
        return all(len(p) == len(xs) * len(zs) for xs, zs, p in groups.values())
    return test


def _incl_test(k):
    def test(elements, tuples):
        firsts = {t[:k] for t in tuples}
        seconds = {t[k:] for t in tuples}
        return firsts <= seconds
    return test


def _nt_test(k):
    def test(elements, tuples):
        if len(tuples) != len(elements) ** k:
            return True
        return not all(e in elements for t in tuples for e in t)
    return test


def _false_test(elements, tuples):
    return False


def _fo_test(phi: Classical, sym: str):
    def test(elements, tuples):
        return sentence_holds(phi, sorted(elements), {sym: tuples})
    return test


def fo_dependency(name: str, phi: Classical | str, k: int, sym: str = "R",
                  shape: tuple[int, ...] | None = None) -> Dependency:
    """Dependency defined by a first order sentence over one ``k``-ary symbol."""
    if isinstance(phi, str):
        phi = parse_classical(phi)
    if phi.free_vars:
        raise DependencyError(f"defining formula of {name} has free variables {sorted(phi.free_vars)}")
    syms = relation_symbols(phi)
    extra = set(syms) - {sym}
    if extra:
        raise DependencyError(f"defining formula of {name} mentions symbols other than {sym}: "
                              f"{sorted(extra)}")
    if sym in syms and syms[sym] != k:
        raise DependencyError(f"{sym} is used with arity {syms[sym]}, declared {k}")
    shape = shape or (k,)
    return Dependency(name, shape, _fo_test(phi, sym), label=f"{name}/{k}", formula=phi)


# Defining sentences for the builtins; used for cross-checks and for the
# constancy-logic construction, which substitutes into them.
def _vars(prefix, n):
    return [f"{prefix}{i}" for i in range(1, n + 1)]


def const_sentence(k: int) -> str:
    x, y = _vars("x", k), _vars("y", k)
    eq = " & ".join(f"{a} = {b}" for a, b in zip(x, y))
    q = " ".join(f"A {v}" for v in x + y)
    return f"{q} (R({','.join(x)}) & R({','.join(y)}) -> {eq})"


def fdep_sentence(j: int, l: int) -> str:
    x, y, y2 = _vars("x", j), _vars("y", l), _vars("z", l)
    eq = " & ".join(f"{a} = {b}" for a, b in zip(y, y2))
    q = " ".join(f"A {v}" for v in x + y + y2)
    return f"{q} (R({','.join(x + y)}) & R({','.join(x + y2)}) -> {eq})"


def indep_sentence(a: int, b: int, c: int) -> str:
    x, x2, y, z, z2 = _vars("x", a), _vars("u", a), _vars("y", b), _vars("z", c), _vars("w", c)
    q = " ".join(f"A {v}" for v in x + x2 + y + z + z2)
    return (f"{q} (R({','.join(x + y + z)}) & R({','.join(x2 + y + z2)}) -> "
            f"R({','.join(x + y + z2)}))")


def incl_sentence(k: int) -> str:
    x, y, z = _vars("x", k), _vars("y", k), _vars("z", k)
    q = " ".join(f"A {v}" for v in x + y)
    e = " ".join(f"E {v}" for v in z)
    return f"{q} (R({','.join(x + y)}) -> {e} R({','.join(z + x)}))"


CEX4_SENTENCE = " & ".join([
    # the projection x <= y is a linear order with endpoints
    "A x E z E u R(x,x,z,u)",
    "A x A y ((E z E u R(x,y,z,u)) & (E z E u R(y,x,z,u)) -> x = y)",
    "A x A y A w ((E z E u R(x,y,z,u)) & (E z E u R(y,w,z,u)) -> E z E u R(x,w,z,u))",
    "A x A y ((E z E u R(x,y,z,u)) | (E z E u R(y,x,z,u)))",
    "E x A y E z E u R(x,y,z,u)",
    "E x A y E z E u R(y,x,z,u)",
    # B z: false at the least element, true somewhere, closed under predecessor
    "A a ((A y E z E u R(a,y,z,u)) -> ~(E x E y E u R(x,y,a,u)))",
    "E a E x E y E u R(x,y,a,u)",
    "A a A b ((E x E y E u R(x,y,b,u)) & a != b & (E z E u R(a,b,z,u))"
    " & (A c ((E z E u R(a,c,z,u)) & (E z E u R(c,b,z,u)) -> c = a | c = b))"
    " -> E x E y E u R(x,y,a,u))",
    # T u: some a outside B with T b iff b <= a
    "E a (~(E x E y E u R(x,y,a,u)) & A b ((E x E y E z R(x,y,z,b)) -> E z E u R(b,a,z,u))"
    " & A b ((E z E u R(b,a,z,u)) -> E x E y E z R(x,y,z,b)))",
])


# -- builtin registry ----------------------------------------------------------

DECLARED = {
    "const": ("empty-team", "downwards", "closed-world"),
    "dep": ("empty-team", "downwards", "closed-world"),
    "indep": ("empty-team", "closed-world"),
    "incl": ("empty-team", "union", "closed-world"),
    "nt": ("empty-team", "downwards"),
    "false": ("downwards", "upwards", "union", "closed-world"),
    "cex4": (),
}


def _declare(dep: Dependency, family: str) -> Dependency:
    for prop in DECLARED.get(family, ()):
        dep.flags[prop] = (True, None)
    return dep


def builtin(family: str, shape: tuple[int, ...]) -> Dependency:
    """Construct a builtin dependency from its family name and group shape."""
    shape = tuple(shape)
    if family == "const":
        if len(shape) != 1 or shape[0] < 1:
            raise DependencyError("const takes one nonempty group: #const(x,...)")
        k = shape[0]
        dep = Dependency("const", shape, _const_test, label=f"const/{k}",
                         formula=parse_classical(const_sentence(k)))
    elif family == "dep":
        if len(shape) != 2 or shape[1] < 1:
            raise DependencyError("dep takes two groups, the second nonempty: #dep(x;y)")
        j, l = shape
        dep = Dependency("dep", shape, _fdep_test(j), label=f"dep({j};{l})",
                         formula=parse_classical(fdep_sentence(j, l)))
    elif family == "indep":
        if len(shape) != 3 or shape[0] < 1 or shape[2] < 1:
            raise DependencyError("indep takes three groups, outer ones nonempty: #indep(x;y;z)")
        a, b, c = shape
        dep = Dependency("indep", shape, _indep_test(a, b), label=f"indep({a};{b};{c})",
                         formula=parse_classical(indep_sentence(a, b, c)))
    elif family == "incl":
        if len(shape) != 2 or shape[0] != shape[1] or shape[0] < 1:
            raise DependencyError("incl takes two nonempty groups of equal length: #incl(x;y)")
        k = shape[0]
        dep = Dependency("incl", shape, _incl_test(k), label=f"incl({k})",
                         formula=parse_classical(incl_sentence(k)))
    elif family == "nt":
        if len(shape) != 1 or shape[0] < 1:
            raise DependencyError("nt takes one nonempty group: #nt(x)")
        k = shape[0]
        dep = Dependency("nt", shape, _nt_test(k), label="nt" if k == 1 else f"nt/{k}")
    elif family == "cex4":
        if shape != (4,):
            raise DependencyError("cex4 takes one group of four variables")
        dep = fo_dependency("cex4", CEX4_SENTENCE, 4)
        dep.label = "cex4"
    elif family == "false":
        if len(shape) != 1 or shape[0] < 1:
            raise DependencyError("false takes one nonempty group")
        dep = Dependency("false", shape, _false_test, label=f"false/{shape[0]}",
                         formula=parse_classical("E x x != x"))
    else:
        raise DependencyError(f"unknown dependency {family!r}")
    return _declare(dep, family)


_SPEC = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:/\s*(\d+)|\(([\d\s;]*)\))?\s*$")


class DependencyRegistry:
    """Resolves dependency atoms ``#name(groups)`` to dependency objects.

    Builtin families are created on demand per shape and cached; user
    dependencies are registered by name.  ``max_<name>`` resolves to the
    dependency of maximal members of ``<name>``.
    """

    def __init__(self):
        self.user: dict[str, Dependency] = {}
        self._cache: dict = {}

    def register(self, dep: Dependency) -> Dependency:
        if dep.name in DECLARED or dep.name.startswith("max_"):
            raise DependencyError(f"{dep.name!r} is a reserved dependency name")
        self.user[dep.name] = dep
        self._cache = {k: v for k, v in self._cache.items() if k[0] != dep.name}
        return dep

    def resolve(self, name: str, shape: tuple[int, ...]) -> Dependency:
        key = (name, tuple(shape))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if name.startswith("max_"):
            dep = dmax_dependency(self.resolve(name[4:], shape))
        elif name in self.user:
            dep = self.user[name]
            if tuple(shape) != dep.shape:
                raise DependencyError(f"dependency {name} takes groups of sizes {dep.shape}, "
                                      f"got {tuple(shape)}")
        elif name in DECLARED:
            dep = builtin(name, shape)
        else:
            raise DependencyError(f"unknown dependency {name!r}")
        self._cache[key] = dep
        return dep

    def atom_dependency(self, atom: DepAtom) -> Dependency:
        return self.resolve(atom.name, atom.shape)

    def parse_spec(self, spec: str) -> Dependency:
        """Resolve ``const/1``, ``dep(1;1)``, ``indep(1;1;1)``, ``incl(1)``, ``nt``, ``cex4`` or a user name."""
        m = _SPEC.match(spec)
        if not m:
            raise DependencyError(f"cannot parse dependency {spec!r}")
        name, k, groups = m.group(1), m.group(2), m.group(3)
        base = name[4:] if name.startswith("max_") else name
        if groups is not None:
            parts = tuple(int(g) for g in groups.replace(" ", "").split(";") if g != "")
            if base == "incl" and len(parts) == 1:
                parts = (parts[0], parts[0])
            return self.resolve(name, parts)
        if k is not None:
            return self.resolve(name, (int(k),))
        if base in self.user:
            return self.resolve(name, self.user[base].shape)
        default = {"const": (1,), "nt": (1,), "cex4": (4,), "false": (1,), "incl": (1, 1),
                   "dep": (1, 1), "indep": (1, 1, 1)}
        if base in default:
            return self.resolve(name, default[base])
        raise DependencyError(f"unknown dependency {spec!r}")

    def load(self, text: str, source: str = "<deps>") -> list[Dependency]:
        deps = parse_dep_file(text, source)
        for d in deps:
            self.register(d)
        return deps


def parse_dep_file(text: str, source: str = "<deps>") -> list[Dependency]:
    """Parse ``dep NAME k`` / ``formula <sentence>`` / ``end`` blocks."""
    out = []
    current = None
    formula_lines: list[str] = []
    formula_line = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip() if not raw.lstrip().startswith("formula") else raw.strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        where = f"{source}:{lineno}"
        if current is None:
            if head != "dep":
                raise DependencyError(f"{where}: expected 'dep NAME k'")
            parts = rest.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise DependencyError(f"{where}: expected 'dep NAME k'")
            current = (parts[0], int(parts[1]), lineno)
            formula_lines = []
        elif head == "end":
            if not formula_lines:
                raise DependencyError(f"{where}: dependency {current[0]} has no formula")
            text_f = " ".join(formula_lines)
            try:
                phi = parse_classical(text_f)
            except FormulaError as exc:
                raise DependencyError(f"{source}:{formula_line}: {exc}") from None
            out.append(fo_dependency(current[0], phi, current[1]))
            current = None
        elif head == "formula":
            formula_lines.append(rest)
            formula_line = lineno
        elif formula_lines:
            formula_lines.append(line)
        else:
            raise DependencyError(f"{where}: expected 'formula <sentence>' or 'end'")
    if current is not None:
        raise DependencyError(f"{source}: dependency {current[0]} is missing 'end'")
    return out


# -- exhaustive checks ---------------------------------------------------------

@dataclass
class Verdict:
    """Outcome of an exhaustive check; ``witness`` describes a counterexample."""

    prop: str
    holds: bool
    bound: int
    witness: dict | None = None

    def describe(self) -> str:
        if self.holds:
            return f"{self.prop}: holds up to |M| = {self.bound}"
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.witness.items())
        return f"{self.prop}: fails ({parts})"


def _fmt(v):
    if isinstance(v, (set, frozenset)):
        items = sorted(v)
        if items and isinstance(items[0], tuple) and len(items[0]) == 1:
            items = [t[0] for t in items]
        return "{" + ",".join(str(i) if not isinstance(i, tuple) else
                              "(" + ",".join(map(str, i)) + ")" for i in items) + "}"
    return str(v)


def _guard(dep: Dependency, m: int):
    if m < 1:
        raise DependencyError("domain bound must be at least 1")
    if m ** dep.arity > MAX_CELLS:
        raise DependencyError(f"{dep.label}: |M|^k = {m}^{dep.arity} exceeds {MAX_CELLS}; "
                              f"use a smaller domain bound")


def _table(dep: Dependency, m: int):
    """(tuples, membership bytes indexed by bitmask) over domain {0..m-1}."""
    hit = dep._tables.get(m)
    if hit is not None:
        return hit
    tuples = list(itertools.product(range(m), repeat=dep.arity))
    elements = frozenset(range(m))
    n = len(tuples)
    mem = bytearray(1 << n)
    test = dep.test
    for mask in range(1 << n):
        rel = frozenset(tuples[i] for i in range(n) if mask >> i & 1)
        mem[mask] = 1 if test(elements, rel) else 0
    dep._tables[m] = (tuples, mem)
    return tuples, mem


def _rel(tuples, mask) -> frozenset:
    return frozenset(t for i, t in enumerate(tuples) if mask >> i & 1)


def check_closure(dep: Dependency, prop: str, max_domain: int) -> Verdict:
    """Exhaustively check a closure property on domains of size 1..max_domain.

    Downwards and upwards closure are checked through single-tuple removals
    and additions (every chain decomposes into such steps); union closure
    through binary unions, which suffices for finite families by induction.
    """
    if prop not in PROPERTIES:
        raise DependencyError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    _guard(dep, max_domain)
    for m in range(1, max_domain + 1):
        tuples, mem = _table(dep, m)
        n = len(tuples)
        M = set(range(m))
        if prop == "empty-team":
            if not mem[0]:
                return _fail(dep, prop, max_domain, {"M": M})
            continue
        members = [mask for mask in range(1 << n) if mem[mask]]
        if prop == "downwards":
            for mask in members:
                for i in range(n):
                    if mask >> i & 1 and not mem[mask ^ (1 << i)]:
                        return _fail(dep, prop, max_domain, {
                            "M": M, "R": _rel(tuples, mask), "Q": _rel(tuples, mask ^ (1 << i))})
        elif prop == "upwards":
            for mask in members:
                for i in range(n):
                    if not mask >> i & 1 and not mem[mask | (1 << i)]:
                        return _fail(dep, prop, max_domain, {
                            "M": M, "R": _rel(tuples, mask), "Q": _rel(tuples, mask | (1 << i))})
        else:
            for ai, a in enumerate(members):
                for b in members[ai + 1:]:
                    if not mem[a | b]:
                        return _fail(dep, prop, max_domain, {
                            "M": M, "R1": _rel(tuples, a), "R2": _rel(tuples, b)})
    dep.record(prop, True, max_domain)
    return Verdict(prop, True, max_domain)


def _fail(dep, prop, bound, witness) -> Verdict:
    dep.record(prop, False, bound)
    return Verdict(prop, False, bound, witness)


def check_closed_world(dep: Dependency, max_domain: int) -> Verdict:
    """Compare membership over ``M`` with membership over the active domain.

    Nonempty relations are scanned first over all domain sizes; the empty
    relation, whose active domain is empty, is compared last.
    """
    _guard(dep, max_domain)
    for m in range(1, max_domain + 1):
        tuples, mem = _table(dep, m)
        for mask in range(1, 1 << len(tuples)):
            rel = _rel(tuples, mask)
            active = frozenset(e for t in rel for e in t)
            if bool(mem[mask]) != bool(dep.test(active, rel)):
                return _fail(dep, "closed-world", max_domain,
                             {"M": set(range(m)), "R": rel, "active": set(active)})
    empty = bool(dep.test(frozenset(), frozenset()))
    for m in range(1, max_domain + 1):
        _, mem = _table(dep, m)
        if bool(mem[0]) != empty:
            return _fail(dep, "closed-world", max_domain,
                         {"M": set(range(m)), "R": set(), "active": set()})
    dep.record("closed-world", True, max_domain)
    return Verdict("closed-world", True, max_domain)


def feasible_bound(dep: Dependency, max_domain: int) -> int:
    """Largest ``m <= max_domain`` with ``m**k`` within the enumeration guard."""
    m = max_domain
    while m > 1 and m ** dep.arity > MAX_CELLS:
        m -= 1
    return m


def classify(dep: Dependency, max_domain: int = 3) -> dict[str, Verdict]:
    """All closure properties and closed-world status, each at a feasible bound."""
    m = feasible_bound(dep, max_domain)
    out = {p: check_closure(dep, p, m) for p in PROPERTIES}
    out["closed-world"] = check_closed_world(dep, m)
    return out


# -- maximal members -----------------------------------------------------------

def _all_relations(elements: Iterable, k: int):
    tuples = list(itertools.product(sorted(elements), repeat=k))
    n = len(tuples)
    for mask in range(1 << n):
        yield mask, frozenset(tuples[i] for i in range(n) if mask >> i & 1)


def compute_dmax(dep: Dependency, elements) -> set[Relation]:
    """The inclusion-maximal relations ``R`` with ``(elements, R)`` in ``dep``."""
    elements = _elements(elements)
    if len(elements) ** dep.arity > MAX_CELLS:
        raise DependencyError(f"{dep.label}: |M|^k = {len(elements)}^{dep.arity} exceeds {MAX_CELLS}")
    members = [(mask, rel) for mask, rel in _all_relations(elements, dep.arity)
               if dep.test(elements, rel)]
    members.sort(key=lambda mr: -bin(mr[0]).count("1"))
    maximal = []
    for mask, rel in members:
        if not any(mask & big == mask and mask != big for big, _ in maximal):
            maximal.append((mask, rel))
    return {Relation(dep.arity, rel) for _, rel in maximal}


def dmax_dependency(dep: Dependency) -> Dependency:
    """The dependency holding exactly of the maximal members of ``dep``."""
    cache: dict = {}

    def test(elements, tuples):
        if elements not in cache:
            cache[elements] = {r.tuples for r in compute_dmax(dep, elements)}
        return tuples in cache[elements]

    return Dependency(f"max_{dep.name}", dep.shape, test, label=f"max_{dep.label}")


# -- relativization ------------------------------------------------------------

def relativized_holds(dep: Dependency, P: Iterable, M, team: Team, variables) -> bool:
    """``D^P``: every value of ``variables`` lies in ``P`` and ``(P, X(v))`` is in ``dep``."""
    P = frozenset(P)
    if not P <= _elements(M):
        raise DependencyError("relativizing set must be a subset of the domain")
    rel = project_team(team, variables)
    if any(e not in P for t in rel.tuples for e in t):
        return False
    return dep_holds(dep, P, rel)


def relativize_closed_world(dep: Dependency, pred: str, variables, max_domain: int = 3):
    """The formula ``P(v1) & ... & P(vk) & #D(v)`` defining ``D^P``.

    Only valid for closed-world dependencies; the property must be declared
    or verifiable at ``max_domain``.
    """
    from .syntax import RelLit, conj

    if not dep.known("closed-world", None):
        verdict = check_closed_world(dep, feasible_bound(dep, max_domain))
        if not verdict.holds:
            raise DependencyError(f"{dep.label} is not closed-world: {verdict.describe()}")
    variables = tuple(variables)
    return conj([RelLit(pred, (v,)) for v in dict.fromkeys(variables)] + [dep.atom(variables)])


def defining_sentence(dep: Dependency) -> Classical:
    if dep.formula is None:
        raise DependencyError(f"{dep.label} has no first order defining sentence")
    return dep.formula


def describe(dep: Dependency) -> str:
    text = dep.label
    if dep.formula is not None:
        text += f" := {to_text(dep.formula)}"
    return text
