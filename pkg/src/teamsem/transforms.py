"""Constructive formula transformations.

Every function here is syntactic; the matching semantic contracts are
checked by the harnesses in :mod:`teamsem.verify`.  Fresh variables and
relation symbols live in the ``_`` namespace and avoid every name already
present in the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .dependencies import (Dependency, DependencyError, DependencyRegistry, check_closure,
                           feasible_bound)
from .syntax import (And, BoolDisj, Classical, DepAtom, EqLit, Exists, FAtom, FEq, FNot, FOr,
                     Forall, Formula, FormulaError, FreshNames, Or, RelLit, SelImp, conj, disj,
                     exists_block, fconj, fdisj, forall_block, ftuple_eq, is_prenex,
                     is_quantifier_free, occurrences, relation_symbols, rename_free,
                     split_prefix, substitute_relation, to_classical, to_nnf, to_prenex,
                     tuple_eq, used_names, walk)


class TransformError(ValueError):
    """A transformation was applied outside its hypotheses."""


def _fresh_for(*nodes) -> FreshNames:
    return FreshNames(used_names(*nodes))


# -- sugar ---------------------------------------------------------------------

def desugar(phi: Formula, fresh: FreshNames | None = None) -> Formula:
    """Rewrite ``~>`` and ``++`` into plain team connectives.

    ``t ~> f`` becomes ``nnf(!t) | (t & f)``; ``f ++ g`` becomes
    ``E z1 E z2 (#const(z1) & #const(z2) & ((z1 = z2 & f) | (z1 != z2 & g)))``.
    """
    fresh = fresh or _fresh_for(phi)

    def go(n):
        if isinstance(n, SelImp):
            return Or(to_nnf(n.cond, negate=True), And(to_nnf(n.cond), go(n.body)))
        if isinstance(n, BoolDisj):
            z1, z2 = fresh("z"), fresh("z")
            body = conj([DepAtom("const", ((z1,),)), DepAtom("const", ((z2,),)),
                         Or(And(EqLit(z1, z2), go(n.left)), And(EqLit(z1, z2, False), go(n.right)))])
            return Exists(z1, Exists(z2, body))
        if isinstance(n, (RelLit, EqLit, DepAtom)):
            return n
        if isinstance(n, (Exists, Forall)):
            return type(n)(n.var, go(n.body))
        return type(n)(go(n.left), go(n.right))

    return go(phi)


# -- extraction ----------------------------------------------------------------

@dataclass
class ExtractionResult:
    formula: Formula
    bindings: list = field(default_factory=list)   # (symbol, dependency, arity)

    @property
    def symbols(self) -> list[str]:
        return [s for s, _, _ in self.bindings]


def certify_downwards(dep: Dependency, max_domain: int = 3) -> None:
    """Raise unless ``dep`` is declared or verified downwards closed."""
    if dep.known("downwards", None):
        return
    verdict = check_closure(dep, "downwards", feasible_bound(dep, max_domain))
    if not verdict.holds:
        raise TransformError(f"{dep.label} is not downwards closed: {verdict.describe()}")


def extract_atoms(phi: Formula, targets: Iterable[str], registry: DependencyRegistry,
                  fresh: FreshNames | None = None) -> ExtractionResult:
    """Replace each atom of a target dependency by a literal on a new relation symbol."""
    targets = set(targets)
    fresh = fresh or _fresh_for(phi)
    result = ExtractionResult(phi)
    certified = set()

    def replace(n):
        if not (isinstance(n, DepAtom) and n.name in targets):
            return None
        dep = registry.resolve(n.name, n.shape)
        if dep.label not in certified:
            certify_downwards(dep)
            certified.add(dep.label)
        sym = fresh("S")
        result.bindings.append((sym, dep, dep.arity))
        return RelLit(sym, n.args)

    result.formula = _map_team_leaves(phi, replace)
    return result


def _map_team_leaves(phi: Formula, fn) -> Formula:
    if isinstance(phi, (RelLit, EqLit, DepAtom)):
        out = fn(phi)
        return phi if out is None else out
    if isinstance(phi, (Exists, Forall)):
        return type(phi)(phi.var, _map_team_leaves(phi.body, fn))
    if isinstance(phi, SelImp):
        return SelImp(phi.cond, _map_team_leaves(phi.body, fn))
    return type(phi)(_map_team_leaves(phi.left, fn), _map_team_leaves(phi.right, fn))


# -- occurrence splitting --------------------------------------------------------

def split_occurrences(chi: Classical, sym: str, fresh: FreshNames | None = None
                      ) -> tuple[Classical, list[str]]:
    """Give every occurrence of ``sym`` its own new symbol ``W_i``."""
    if not all(pos for _, pos in occurrences(chi, sym)):
        raise TransformError(f"{sym} occurs negatively")
    fresh = fresh or _fresh_for(chi)
    names: list[str] = []

    def go(n):
        if isinstance(n, FAtom):
            if n.sym != sym:
                return n
            names.append(fresh("W"))
            return FAtom(names[-1], n.args)
        if isinstance(n, FEq):
            return n
        if isinstance(n, FNot):
            return FNot(go(n.body))
        if hasattr(n, "var"):
            return type(n)(n.var, go(n.body))
        return type(n)(go(n.left), go(n.right))

    return go(chi), names


# -- union of encoded relations ----------------------------------------------------

def build_dep_union(dep: Dependency, vs: Sequence[Sequence[str]], ws: Sequence[Sequence[str]],
                    fresh: FreshNames | None = None) -> Formula:
    """The formula stating that ``dep`` holds of the union of the relations ``W_i``.

    ``W_i`` is encoded by the team as the ``v_i`` values of the rows where
    ``v_i = w_i``.  Correct on models with at least two elements.
    """
    n = len(vs)
    if n < 1 or len(ws) != n:
        raise TransformError("need one w tuple per v tuple, at least one pair")
    k = dep.arity
    if any(len(v) != k or len(w) != k for v, w in zip(vs, ws)):
        raise TransformError(f"every v and w tuple must have length {k}")
    fresh = fresh or FreshNames({x for t in list(vs) + list(ws) for x in t})
    ps = fresh.many("p", n)
    q = fresh("q")
    z0, z1 = fresh.many("z", k), fresh.many("z", k)
    cases = []
    for i in range(n):
        cond = fconj([FNot(FEq(q, ps[j])) for j in range(i)] + [FEq(q, ps[i])])
        cases.append(SelImp(cond, tuple_eq(z0 + z1, tuple(vs[i]) + tuple(ws[i]))))
    atom = dep.atom(z0)
    body = And(conj(cases), SelImp(ftuple_eq(z0, z1), atom))
    guarded = SelImp(fdisj([FEq(q, p) for p in ps]), body)
    return forall_block(ps + (q,), exists_block(z0 + z1, guarded))


# -- put-back ----------------------------------------------------------------------

def put_back_qfree(psi: Formula, sym: str, arity: int, fresh: FreshNames | None = None
                   ) -> tuple[Formula, tuple[str, ...], tuple[str, ...]]:
    """Replace the single positive ``sym(t)`` by ``v = w & t = w`` with new ``v``, ``w``."""
    if not is_quantifier_free(psi):
        raise TransformError("put-back needs a quantifier-free formula")
    occ = occurrences(psi, sym)
    if len(occ) > 1:
        raise TransformError(f"{sym} occurs {len(occ)} times; split occurrences first")
    if occ and not occ[0][1]:
        raise TransformError(f"{sym} occurs negatively")
    fresh = fresh or _fresh_for(psi)
    v, w = fresh.many("v", arity), fresh.many("w", arity)

    def replace(n):
        if isinstance(n, RelLit) and n.sym == sym:
            if len(n.args) != arity:
                raise TransformError(f"{sym} used with arity {len(n.args)}, expected {arity}")
            return And(tuple_eq(v, w), tuple_eq(n.args, w))
        return None

    return _map_team_leaves(psi, replace), v, w


@dataclass
class PutbackGroup:
    """Symbols ``W_1 .. W_n`` whose union must satisfy ``dep``."""

    dep: Dependency
    symbols: tuple[str, ...]
    vs: list = field(default_factory=list)
    ws: list = field(default_factory=list)


def assemble_putback(chi: Classical, groups: Sequence[PutbackGroup],
                     fresh: FreshNames | None = None) -> Formula:
    """Turn a prenex first order ``chi`` over the group symbols into a team sentence.

    The result keeps ``chi``'s prefix, then existentially introduces a
    ``v_i w_i`` pair per symbol, and conjoins one union formula per group with
    the rewritten matrix.
    """
    if isinstance(chi, Formula):
        chi = to_classical(chi)
    if not is_prenex(chi):
        raise TransformError("put-back needs a formula in prenex form")
    prefix, matrix = split_prefix(chi)
    psi = to_nnf(matrix)
    fresh = fresh or _fresh_for(chi)
    arities = relation_symbols(chi)
    unions, pairs = [], []
    for g in groups:
        g.vs, g.ws = [], []
        for sym in g.symbols:
            if sym in arities and arities[sym] != g.dep.arity:
                raise TransformError(f"{sym} has arity {arities[sym]}, {g.dep.label} needs {g.dep.arity}")
            psi, v, w = put_back_qfree(psi, sym, g.dep.arity, fresh)
            g.vs.append(v)
            g.ws.append(w)
            pairs.extend(v + w)
        if g.symbols:
            unions.append(build_dep_union(g.dep, g.vs, g.ws, fresh))
    out = And(conj(unions), psi) if unions else psi
    out = exists_block(pairs, out)
    for kind, var in reversed(prefix):
        out = (Exists if kind == "E" else Forall)(var, out)
    return out


# -- the safety pipeline -----------------------------------------------------------

FOTranslation = Callable[[Formula, ExtractionResult], Classical]


def safety_pipeline(phi: Formula, targets: Iterable[str], registry: DependencyRegistry,
                    fo_translation: FOTranslation | None = None) -> Formula:
    """Rewrite a sentence so that target atoms only occur inside union formulas.

    ``fo_translation`` turns the extracted formula (first order apart from
    the new symbols, or not) into an equivalent classical formula; by
    default the extracted formula must already be first order.
    """
    if phi.free_vars:
        raise TransformError(f"not a sentence: free variables {sorted(phi.free_vars)}")
    fresh = _fresh_for(phi)
    plain = desugar(phi, fresh)
    ext = extract_atoms(plain, targets, registry, fresh)
    if fo_translation is None:
        try:
            chi = to_classical(ext.formula)
        except FormulaError as exc:
            raise TransformError("extracted formula is not first order; supply a translation "
                                 f"({exc.message})") from None
    else:
        chi = fo_translation(ext.formula, ext)
        if isinstance(chi, Formula):
            try:
                chi = to_classical(chi)
            except FormulaError as exc:
                raise TransformError(f"translation output is not first order ({exc.message})") from None
        if not isinstance(chi, Classical):
            raise TransformError("translation must return a classical formula")
    fresh.used |= used_names(chi)
    for sym in ext.symbols:
        if not all(pos for _, pos in occurrences(chi, sym)):
            raise TransformError(f"{sym} occurs negatively after translation")
    groups = []
    for sym, dep, _ in ext.bindings:
        chi, names = split_occurrences(chi, sym, fresh)
        if not names and not (dep.known("empty-team", None)
                              or dep.has("empty-team", feasible_bound(dep, 3))):
            raise TransformError(f"{sym} vanished and {dep.label} lacks the empty team property")
        groups.append(PutbackGroup(dep, tuple(names)))
    chi = to_prenex(chi)
    fresh.used |= used_names(chi)
    return assemble_putback(chi, [g for g in groups if g.symbols], fresh)


# -- maximal relations -----------------------------------------------------------

def _neq(xs, ys) -> Formula:
    return disj(EqLit(x, y, False) for x, y in zip(xs, ys))


def build_phi_R(dep: Dependency, sym: str = "R") -> Formula:
    """Sentence true iff some proper superset of ``sym`` satisfies ``dep``."""
    k = dep.arity
    xs = tuple(f"x{i}" for i in range(1, k + 1)) if k > 1 else ("x",)
    ys = tuple(f"y{i}" for i in range(1, k + 1)) if k > 1 else ("y",)
    inner = Or(And(RelLit(sym, ys, False), _neq(xs, ys)), dep.atom(ys))
    return exists_block(xs, And(RelLit(sym, xs, False), forall_block(ys, inner)))


def build_theta_T(dep: Dependency, sym: str = "T") -> Formula:
    """Sentence true iff ``sym`` extends to a maximal member of ``dep``."""
    k = dep.arity
    xs = tuple(f"x{i}" for i in range(1, k + 1)) if k > 1 else ("x",)
    atom = dep.atom(xs)
    dmax = DepAtom("max_" + atom.name, atom.groups)
    return forall_block(xs, Or(RelLit(sym, xs, False), dmax))


# -- constancy definitions ----------------------------------------------------------

@dataclass(frozen=True)
class Eq1Case:
    """A formula ``theta(x, z)`` over the empty vocabulary with parameters ``x``."""

    theta: Classical
    params: tuple[str, ...]
    extra: tuple[str, ...] = ()


def build_eq1(dep: Dependency, cases: Sequence[Eq1Case], v: Sequence[str],
              sym: str = "R") -> Formula:
    """Boolean disjunction over the cases of ``E z (#const(z) & chi(z) & theta(v, z))``.

    ``chi`` is ``dep``'s defining sentence with ``sym`` replaced by
    ``theta``.  With no cases the result is the always false atom.
    """
    v = tuple(v)
    if dep.formula is None:
        raise TransformError(f"{dep.label} has no defining sentence")
    if len(v) != dep.arity:
        raise TransformError(f"{dep.label} needs {dep.arity} variables, got {len(v)}")
    if not cases:
        return DepAtom("false", (v,))
    fresh = FreshNames(set(v) | used_names(dep.formula, *[c.theta for c in cases]))
    parts = []
    for case in cases:
        if relation_symbols(case.theta):
            raise TransformError("case formulas must not mention relation symbols")
        if len(case.params) != dep.arity:
            raise TransformError(f"case needs {dep.arity} parameters, got {len(case.params)}")
        stray = case.theta.free_vars - set(case.params) - set(case.extra)
        if stray:
            raise TransformError(f"case formula has undeclared free variables {sorted(stray)}")
        theta, zs = case.theta, tuple(case.extra)
        clash = [z for z in zs if z in v]
        if clash:
            new = {z: fresh(z) for z in clash}
            theta = rename_free(theta, new, fresh)
            zs = tuple(new.get(z, z) for z in zs)
        chi = substitute_relation(dep.formula, sym, theta, case.params)
        here = rename_free(theta, dict(zip(case.params, v)), fresh)
        body = [to_nnf(chi), to_nnf(here)]
        if zs:
            body.insert(0, DepAtom("const", (zs,)))
        parts.append(exists_block(zs, conj(body)))
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = BoolDisj(p, out)
    return out


# -- relativized non-totality --------------------------------------------------------

def build_nt_relativized(t: str = "t", pred: str = "P", bound: str | None = None) -> Formula:
    """``P(t) & A x ((x = t | !P(x)) ~> #nt(x))``, defining non-totality relative to ``P``."""
    x = bound or ("x" if t != "x" else "x1")
    if x == t:
        raise TransformError("bound variable must differ from t")
    cond = FOr(FEq(x, t), FNot(FAtom(pred, (x,))))
    return And(RelLit(pred, (t,)), Forall(x, SelImp(cond, DepAtom("nt", ((x,),)))))


PASSES = ("desugar", "extract", "split", "dep-union", "putback-qfree", "putback", "pipeline",
          "prenex", "nnf", "phi-r", "theta-t", "eq1", "nt-relativized", "relativize")
