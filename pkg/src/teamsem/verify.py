"""Exhaustive verification harnesses.

Each harness enumerates cases (model, team, formula, ...) and yields them
lazily as ``(case_id, thunk)``; the thunk returns ``("pass"|"fail"|"na",
artifact)``.  Running a harness evaluates the thunks, optionally only
those whose position modulo ``jobs`` belongs to a worker, and collects a
:class:`Report`.  A failing case can be re-run from its id alone.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .corpus import BASE_POOL, FormulaGenerator, literals, random_corpus, random_sentence, shallow_corpus
from .dependencies import (DependencyRegistry, MAX_CELLS, check_closed_world, compute_dmax,
                           dep_holds, fo_dependency, relativize_closed_world, relativized_holds)
from .evaluate import RULES, EvalConfig, TeamEvaluator, sentence_true
from .fileio import format_model, format_team
from .model import Structure, Team, enumerate_lax_supplements, project_team, restrict_team, select_team
from .syntax import (And, BoolDisj, Classical, DepAtom, EqLit, Exists, FAtom, Forall, Formula,
                     Or, RelLit, SelImp, check_positive, count_occurrences, free_vars,
                     parse_classical, to_classical, to_nnf, to_prenex, to_text)
from .tarski import row_predicate, sentence_holds
from .transforms import (Eq1Case, PutbackGroup, assemble_putback, build_dep_union, build_eq1,
                         build_nt_relativized, build_phi_R, build_theta_T, desugar, extract_atoms,
                         put_back_qfree, safety_pipeline, split_occurrences)

VERDICTS = ("pass", "fail", "na")


class VerifyError(ValueError):
    pass


# -- enumeration ---------------------------------------------------------------

def enumerate_relations(elements, k: int) -> Iterator[frozenset]:
    """All ``k``-ary relations over ``elements``, ordered by size then lexicographically."""
    elements = sorted(elements) if not isinstance(elements, int) else list(range(elements))
    if len(elements) ** k > MAX_CELLS:
        raise VerifyError(f"{len(elements)}^{k} tuples exceed the enumeration guard {MAX_CELLS}")
    tuples = list(itertools.product(elements, repeat=k))
    for n in range(len(tuples) + 1):
        for combo in itertools.combinations(tuples, n):
            yield frozenset(combo)


def enumerate_models(max_size: int, signature: dict[str, int], min_size: int = 1) -> Iterator[Structure]:
    """Every structure over ``{0..m-1}`` for ``min_size <= m <= max_size``."""
    syms = sorted(signature)
    for m in range(min_size, max_size + 1):
        choices = [list(enumerate_relations(m, signature[s])) for s in syms]
        for combo in itertools.product(*choices):
            yield Structure.canonical(m, {s: (signature[s], r) for s, r in zip(syms, combo)})


def enumerate_teams(size: int, variables, max_rows: int) -> Iterator[Team]:
    """Every team over ``variables`` with at most ``max_rows`` rows."""
    variables = tuple(variables)
    rows = list(itertools.product(range(size), repeat=len(variables)))
    for n in range(min(max_rows, len(rows)) + 1):
        for combo in itertools.combinations(rows, n):
            yield Team(variables, combo)


def orbit_representatives(teams: Iterable[Team], size: int) -> Iterator[Team]:
    """Teams that are least in their orbit under permutations of the domain."""
    perms = list(itertools.permutations(range(size)))
    for t in teams:
        key = t.rows
        if all(tuple(sorted(tuple(p[e] for e in r) for r in t.rows)) >= key for p in perms):
            yield t


# -- reports -----------------------------------------------------------------------

@dataclass
class SweepSpec:
    max_domain: int = 2
    max_rows: int = 4
    seed: int = 42
    formulas: int = 200
    depth: int = 4
    budget: int | None = None
    jobs: int = 1


@dataclass
class Report:
    harness: str
    cases: list = field(default_factory=list)       # (case_id, verdict)
    failures: list = field(default_factory=list)    # artifact dicts
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    def count(self, verdict: str) -> int:
        return sum(1 for _, v in self.cases if v == verdict)

    @property
    def ok(self) -> bool:
        return self.count("fail") == 0

    def canonicalize(self):
        self.cases.sort(key=lambda c: _id_key(c[0]))
        self.failures.sort(key=lambda a: _id_key(a["case"]))
        return self

    def summary(self) -> str:
        return (f"{self.harness}: {'PASS' if self.ok else 'FAIL'}  cases={len(self.cases)} "
                f"pass={self.count('pass')} fail={self.count('fail')} na={self.count('na')} "
                f"time={self.seconds:.2f}s")

    def to_text(self) -> str:
        out = [self.summary()]
        out.extend(f"  note: {n}" for n in self.notes)
        for art in self.failures[:20]:
            out.append(f"  counterexample {art['case']}:")
            for key in sorted(art):
                if key == "case":
                    continue
                text = str(art[key]).rstrip("\n").replace("\n", "\n      ")
                out.append(f"    {key}: {text}")
        if len(self.failures) > 20:
            out.append(f"  ... {len(self.failures) - 20} more")
        return "\n".join(out) + "\n"

    def to_lines(self) -> str:
        out = [f"HARNESS {self.harness}"]
        out.extend(f"NOTE {json.dumps(n)}" for n in self.notes)
        out.extend(f"CASE {cid} {v}" for cid, v in self.cases)
        out.extend(f"ARTIFACT {json.dumps(a, sort_keys=True)}" for a in self.failures)
        out.append(f"TIME {self.seconds!r}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_lines(cls, text: str) -> "Report":
        report = None
        for no, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            head, _, rest = line.partition(" ")
            if head == "HARNESS":
                report = cls(rest)
            elif report is None:
                raise VerifyError(f"line {no}: report must start with HARNESS")
            elif head == "CASE":
                cid, verdict = rest.rsplit(" ", 1)
                if verdict not in VERDICTS:
                    raise VerifyError(f"line {no}: unknown verdict {verdict!r}")
                report.cases.append((cid, verdict))
            elif head == "ARTIFACT":
                report.failures.append(json.loads(rest))
            elif head == "NOTE":
                report.notes.append(json.loads(rest))
            elif head == "TIME":
                report.seconds = float(rest)
            else:
                raise VerifyError(f"line {no}: unexpected {head!r}")
        if report is None:
            raise VerifyError("empty report")
        return report

    def merge(self, other: "Report") -> "Report":
        out = Report(self.harness, self.cases + other.cases, self.failures + other.failures,
                     max(self.seconds, other.seconds), list(dict.fromkeys(self.notes + other.notes)))
        return out.canonicalize()


def _id_key(cid: str):
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in cid.split(":"))


def artifact(case_id, structure=None, team=None, formula=None, **extra) -> dict:
    art = {"case": case_id}
    if structure is not None:
        art["model"] = format_model(structure)
    if team is not None and structure is not None:
        art["team"] = format_team(team, structure)
    if formula is not None:
        art["formula"] = to_text(formula) if not isinstance(formula, str) else formula
    for k, v in extra.items():
        art[k] = v if isinstance(v, (bool, int, str, type(None))) else str(v)
    return art


def _compare(cid, expected, actual, **ctx):
    if expected == actual:
        return "pass", None
    return "fail", artifact(cid, expected=expected, actual=actual, **ctx)


# -- shared fixtures -----------------------------------------------------------------

SIG = {"R": 2}
UNARY = {"P": 1}


def _registry() -> DependencyRegistry:
    return DependencyRegistry()


def _models(spec: SweepSpec, signature=SIG, min_size=1):
    return list(enumerate_models(spec.max_domain, signature, min_size))


def _fo_corpus(spec: SweepSpec) -> list[Formula]:
    return shallow_corpus() + random_corpus(spec.seed, spec.formulas, spec.depth, literals(SIG))


DC_ATOMS = (DepAtom("const", (("x",),)), DepAtom("const", (("y",),)),
            DepAtom("dep", (("x",), ("y",))), DepAtom("dep", (("y",), ("x",))))
UNION_ATOMS = (DepAtom("incl", (("x",), ("y",))), DepAtom("incl", (("y",), ("x",))),
               DepAtom("incl", (("x",), ("x",))))


def _dep_corpus(seed: int, atoms, n: int, depth: int = 3, sugar=False) -> list[Formula]:
    gen = FormulaGenerator(seed, literals(SIG), atoms, sugar=sugar)
    return list(atoms) + gen.many(n, depth)


# -- harness implementations ------------------------------------------------------------

def h_flatness(spec: SweepSpec):
    """First order formulas: team truth equals the row-wise Tarskian fold; sentences agree at {ε}."""
    corpus = _fo_corpus(spec)
    for mi, M in enumerate(_models(spec)):
        ev = TeamEvaluator(M, config=RULES)
        teams = list(enumerate_teams(M.size, ("x", "y"), spec.max_rows))
        for fi, phi in enumerate(corpus):
            def fold_pred(phi=phi, M=M):
                return row_predicate(M, to_classical(phi), ("x", "y"))
            pred_box = []
            for ti, T in enumerate(teams):
                def case(phi=phi, T=T, M=M, ev=ev, cid=f"{fi}:{mi}:{ti}"):
                    if not pred_box:
                        pred_box.append(fold_pred())
                    expected = all(pred_box[0](r) for r in T.rows)
                    return _compare(cid, expected, ev.holds(phi, T), structure=M, team=T, formula=phi)
                yield f"{fi}:{mi}:{ti}", case
            for qi, sent in enumerate((Exists("x", Exists("y", phi)), Forall("x", Forall("y", phi)))):
                cid = f"{fi}:{mi}:s{qi}"

                def case(sent=sent, M=M, ev=ev, cid=cid):
                    expected = sentence_holds(to_classical(sent), M.elements, M.interpretation())
                    return _compare(cid, expected, ev.holds(sent, Team.unit()), structure=M, formula=sent)
                yield cid, case


def pad_team(T: Team, size: int) -> list[Team]:
    """Teams over ``T``'s variables plus a dummy ``u`` that restrict back to ``T``."""
    x = T.index("x")
    return [Team(("u",) + T.vardom, [(0,) + r for r in T.rows]),
            Team(("u",) + T.vardom, [(r[x],) + r for r in T.rows]),
            Team(("u",) + T.vardom, [(e,) + r for r in T.rows for e in range(size)])]


def h_locality(spec: SweepSpec):
    """Truth only depends on the restriction of the team to the free variables."""
    corpus = _fo_corpus(spec) + _dep_corpus(spec.seed + 1, DC_ATOMS + UNION_ATOMS, 60)
    plain = EvalConfig(memo=False)
    for mi, M in enumerate(_models(spec)):
        ev = TeamEvaluator(M, config=plain)
        teams = [P for T in enumerate_teams(M.size, ("x", "y"), spec.max_rows)
                 for P in pad_team(T, M.size)]
        for fi, phi in enumerate(corpus):
            fv = phi.free_vars
            for ti, T in enumerate(teams):
                cid = f"{fi}:{mi}:{ti}"

                def case(phi=phi, T=T, M=M, ev=ev, cid=cid, fv=fv):
                    return _compare(cid, ev.holds(phi, restrict_team(T, fv)), ev.holds(phi, T),
                                    structure=M, team=T, formula=phi)
                yield cid, case


def _subteams(T: Team):
    for n in range(len(T.rows)):
        for combo in itertools.combinations(T.rows, n):
            yield T.subteam(combo)


def h_closure_transfer(spec: SweepSpec):
    """Downwards closed atoms give downwards closed formulas; union closed atoms likewise."""
    for kind, atoms, seed in (("down", DC_ATOMS, spec.seed), ("union", UNION_ATOMS, spec.seed + 7)):
        corpus = _dep_corpus(seed, atoms, 60)
        for mi, M in enumerate(_models(spec)):
            ev = TeamEvaluator(M)
            teams = list(enumerate_teams(M.size, ("x", "y"), spec.max_rows))
            for fi, phi in enumerate(corpus):
                cid = f"{kind}:{fi}:{mi}"

                def case(phi=phi, M=M, ev=ev, cid=cid, teams=teams, kind=kind):
                    if not ev.holds(phi, Team(("x", "y"))):
                        return "fail", artifact(cid, M, None, phi, problem="empty team fails")
                    good = [T for T in teams if ev.holds(phi, T)]
                    if kind == "down":
                        for T in good:
                            for Y in _subteams(T):
                                if not ev.holds(phi, Y):
                                    return "fail", artifact(cid, M, Y, phi, superteam=format_team(T, M))
                    else:
                        for A, B in itertools.combinations(good, 2):
                            U = A.union(B)
                            if not ev.holds(phi, U):
                                return "fail", artifact(cid, M, U, phi, left=format_team(A, M),
                                                        right=format_team(B, M))
                    return "pass", None
                yield cid, case


def _sugar_bodies(spec):
    return _dep_corpus(spec.seed + 3, DC_ATOMS + UNION_ATOMS, 40, depth=2)


def h_sugar_selimp(spec: SweepSpec):
    """``t ~> f`` holds iff ``f`` holds on the selected subteam; desugaring agrees."""
    gen = FormulaGenerator(spec.seed + 5, literals(SIG))
    conds = [gen.classical(1) for _ in range(10)]
    bodies = _sugar_bodies(spec)
    for mi, M in enumerate(_models(spec)):
        ev = TeamEvaluator(M)
        teams = list(enumerate_teams(M.size, ("x", "y"), spec.max_rows))
        for ci, cond in enumerate(conds):
            for bi, body in enumerate(bodies):
                phi = SelImp(cond, body)
                plain = desugar(phi)
                for ti, T in enumerate(teams):
                    cid = f"{ci}:{bi}:{mi}:{ti}"

                    def case(phi=phi, plain=plain, T=T, M=M, ev=ev, cid=cid, cond=cond, body=body):
                        short = ev.holds(phi, T)
                        direct = ev.holds(body, select_team(T, cond, M))
                        unsugared = ev.holds(plain, T)
                        if short == direct == unsugared:
                            return "pass", None
                        return "fail", artifact(cid, M, T, phi, shortcut=short, on_selection=direct,
                                                desugared=unsugared)
                    yield cid, case


def etp_counterexample(registry: DependencyRegistry | None = None):
    """A dependency without the empty team property for which desugared ``++`` differs.

    ``ne`` holds of nonempty relations; ``#ne(x) ++ #ne(x)`` holds on a
    one-row team but its constancy encoding needs one side on the empty team.
    """
    registry = registry or _registry()
    if "ne" not in registry.user:
        registry.register(fo_dependency("ne", "E x R(x)", 1))
    atom = DepAtom("ne", (("x",),))
    phi = BoolDisj(atom, atom)
    M = Structure.canonical(2)
    T = Team(("x",), [(0,)])
    ev = TeamEvaluator(M, registry)
    return M, T, phi, ev.holds(phi, T), ev.holds(desugar(phi), T)


def h_sugar_booldisj(spec: SweepSpec):
    """``f ++ g`` holds iff one side holds, for atoms with the empty team property."""
    bodies = _sugar_bodies(spec)
    rng = random.Random(spec.seed + 11)
    pairs = [(rng.choice(bodies), rng.choice(bodies)) for _ in range(40)]
    for mi, M in enumerate(_models(spec)):
        ev = TeamEvaluator(M)
        teams = list(enumerate_teams(M.size, ("x", "y"), spec.max_rows))
        for pi, (f, g) in enumerate(pairs):
            phi = BoolDisj(f, g)
            plain = desugar(phi)
            for ti, T in enumerate(teams):
                cid = f"{pi}:{mi}:{ti}"

                def case(phi=phi, plain=plain, f=f, g=g, T=T, M=M, ev=ev, cid=cid):
                    short = ev.holds(phi, T)
                    either = ev.holds(f, T) or ev.holds(g, T)
                    if short != either:
                        return "fail", artifact(cid, M, T, phi, shortcut=short, either=either)
                    if M.size < 2:
                        return "na", None
                    unsugared = ev.holds(plain, T)
                    return _compare(cid, either, unsugared, structure=M, team=T, formula=phi)
                yield cid, case
    cid = "etp"

    def witness():
        M, T, phi, short, unsugared = etp_counterexample()
        if short and not unsugared:
            return "pass", None
        return "fail", artifact(cid, M, T, phi, shortcut=short, desugared=unsugared)
    yield cid, witness


def h_positive_upwards(spec: SweepSpec):
    """Formulas with only positive ``R`` stay true when ``R`` grows."""
    corpus = [f for f in _dep_corpus(spec.seed + 13, DC_ATOMS + UNION_ATOMS, 150)
              + shallow_corpus() if check_positive(f, "R")]
    models = _models(spec)
    for fi, phi in enumerate(corpus):
        for mi, M in enumerate(models):
            cid = f"{fi}:{mi}"

            def case(phi=phi, M=M, cid=cid):
                R = M.lookup("R")
                bigger = [M.with_relation("R", 2, Q) for Q in enumerate_relations(M.size, 2) if Q > R]
                ev = TeamEvaluator(M)
                evs = [TeamEvaluator(N) for N in bigger]
                for T in enumerate_teams(M.size, ("x", "y"), spec.max_rows):
                    if ev.holds(phi, T):
                        for N, e2 in zip(bigger, evs):
                            if not e2.holds(phi, T):
                                return "fail", artifact(cid, M, T, phi, larger=format_model(N))
                return "pass", None
            yield cid, case


# -- transformation sweeps ------------------------------------------------------------

UNARY_POOL = literals(UNARY)
CONST_ATOMS = (DepAtom("const", (("x",),)), DepAtom("const", (("y",),)))


def _with_relations(M: Structure, rels: dict) -> Structure:
    for sym, (k, tuples) in rels.items():
        M = M.with_relation(sym, k, tuples)
    return M


def h_extraction(spec: SweepSpec):
    """Target atoms can be traded for new relation symbols that satisfy the dependency."""
    registry = _registry()
    gen = FormulaGenerator(spec.seed + 17, UNARY_POOL, CONST_ATOMS)
    corpus = [f for f in gen.many(120, 3) if any(isinstance(a, DepAtom) for a in _leaves(f))][:40]
    for fi, phi in enumerate(corpus):
        ext = extract_atoms(phi, {"const"}, registry)
        for mi, M in enumerate(enumerate_models(min(spec.max_domain, 2), UNARY)):
            ev = TeamEvaluator(M, registry)
            rels = list(enumerate_relations(M.size, 1))
            teams = list(enumerate_teams(M.size, ("x", "y"), min(spec.max_rows, 3)))
            for ti, T in enumerate(teams):
                cid = f"{fi}:{mi}:{ti}"

                def case(phi=phi, ext=ext, M=M, T=T, ev=ev, rels=rels, cid=cid):
                    lhs = ev.holds(phi, T)
                    choices = [[r for r in rels if dep_holds(dep, M.elements, r)]
                               for _, dep, _ in ext.bindings]
                    rhs = False
                    for combo in itertools.product(*choices):
                        N = _with_relations(M, {s: (1, r) for s, r in zip(ext.symbols, combo)})
                        if TeamEvaluator(N, registry).holds(ext.formula, T):
                            rhs = True
                            break
                    return _compare(cid, lhs, rhs, structure=M, team=T, formula=phi,
                                    extracted=to_text(ext.formula))
                yield cid, case


def _leaves(phi):
    from .syntax import walk
    return [n for n in walk(phi) if isinstance(n, (RelLit, EqLit, DepAtom))]


def _positive_sentences(seed: int, n: int, need: int = 2):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        s = random_sentence(rng, 3, ["P", "S"], positive=["S"])
        if count_occurrences(s, "S") >= need and check_positive(s, "S"):
            out.append(s)
    return out


def h_singleocc(spec: SweepSpec):
    """Splitting the occurrences of ``S`` into ``W_i`` with a union constraint is equivalent."""
    registry = _registry()
    dep = registry.resolve("const", (1,))
    for fi, chi in enumerate(_positive_sentences(spec.seed + 19, 30)):
        split, names = split_occurrences(chi, "S")
        for mi, M in enumerate(enumerate_models(min(spec.max_domain, 2), UNARY)):
            cid = f"{fi}:{mi}"

            def case(chi=chi, split=split, names=names, M=M, cid=cid):
                rels = list(enumerate_relations(M.size, 1))
                interp = M.interpretation()
                lhs = any(dep_holds(dep, M.elements, S)
                          and sentence_holds(chi, M.elements, {**interp, "S": S}) for S in rels)
                rhs = False
                for combo in itertools.product(rels, repeat=len(names)):
                    union = frozenset().union(*combo)
                    if dep_holds(dep, M.elements, union) and sentence_holds(
                            split, M.elements, {**interp, **dict(zip(names, combo))}):
                        rhs = True
                        break
                return _compare(cid, lhs, rhs, structure=M, formula=to_text(chi),
                                split=to_text(split))
            yield cid, case


def h_dep_union(spec: SweepSpec):
    """The union formula holds iff the dependency holds of the union of the encoded relations."""
    registry = _registry()
    deps = [registry.resolve("const", (1,)), registry.resolve("nt", (1,))]
    for di, dep in enumerate(deps):
        for n in (1, 2):
            vs = [(f"v{i}",) for i in range(1, n + 1)]
            ws = [(f"w{i}",) for i in range(1, n + 1)]
            phi = build_dep_union(dep, vs, ws)
            variables = tuple(x for v, w in zip(vs, ws) for x in v + w)
            for m in range(1, max(spec.max_domain, 3) + 1):
                M = Structure.canonical(m)
                ev = TeamEvaluator(M, registry)
                teams = orbit_representatives(enumerate_teams(m, variables, 3), m)
                for ti, T in enumerate(teams):
                    cid = f"{di}:{n}:{m}:{ti}"

                    def case(phi=phi, T=T, M=M, ev=ev, cid=cid, vs=vs, ws=ws, dep=dep):
                        if M.size < 2:
                            return "na", None
                        union = frozenset()
                        for v, w in zip(vs, ws):
                            sel = T.subteam(r for r in T.rows
                                            if all(r[T.index(a)] == r[T.index(b)] for a, b in zip(v, w)))
                            union |= project_team(sel, v).tuples
                        expected = dep_holds(dep, M.elements, union)
                        return _compare(cid, expected, ev.holds(phi, T), structure=M, team=T,
                                        formula=phi, dependency=dep.label)
                    yield cid, case


def _qfree_corpus(seed: int, n: int):
    gen = FormulaGenerator(seed, UNARY_POOL, CONST_ATOMS)
    out = []
    w = RelLit("W", ("x",))
    while len(out) < n:
        f = _qfree(gen, 2)
        rng = gen.rng
        out.append(rng.choice([And, Or])(f, w) if rng.random() < 0.5 else
                   rng.choice([And, Or])(w, f))
    return out


def _qfree(gen, depth):
    if depth == 0 or gen.rng.random() < 0.4:
        return gen.leaf()
    return gen.rng.choice([And, Or])(_qfree(gen, depth - 1), _qfree(gen, depth - 1))


def h_qfree_putback(spec: SweepSpec):
    """``W(t)`` can be replaced by ``v = w & t = w`` with ``W`` bounding the encoded relation."""
    registry = _registry()
    for fi, psi in enumerate(_qfree_corpus(spec.seed + 23, 12)):
        out, v, w = put_back_qfree(psi, "W", 1)
        for mi, M in enumerate(enumerate_models(min(spec.max_domain, 2), UNARY)):
            for Wi, W in enumerate(enumerate_relations(M.size, 1)):
                N = M.with_relation("W", 1, W)
                for ti, T in enumerate(enumerate_teams(M.size, ("x", "y"), min(spec.max_rows, 2))):
                    cid = f"{fi}:{mi}:{Wi}:{ti}"

                    def case(psi=psi, out=out, v=v, w=w, N=N, M=M, W=W, T=T, cid=cid):
                        lhs = TeamEvaluator(N, registry).holds(psi, T)
                        ev = TeamEvaluator(M, registry)
                        rhs = False
                        for Y in enumerate_lax_supplements(T, v + w, M.size):
                            sel = Y.subteam(r for r in Y.rows if r[Y.index(v[0])] == r[Y.index(w[0])])
                            if project_team(sel, v).tuples <= W and ev.holds(out, Y):
                                rhs = True
                                break
                        if M.size < 2 and lhs != rhs:
                            return "na", None
                        return _compare(cid, lhs, rhs, structure=N, team=T, formula=psi,
                                        rewritten=to_text(out))
                    yield cid, case


def _prenex_w_sentences(seed: int, n: int):
    """Prenex sentences over ``P`` with ``W1``/``W2`` each occurring once, positively."""
    out = []
    for chi in _positive_sentences(seed, n):
        chi = to_prenex(chi)
        split, names = split_occurrences(chi, "S")
        out.append((split, names))
    return out


def h_putback_sentence(spec: SweepSpec):
    """The assembled team sentence holds iff some ``W_i`` with ``D`` on their union satisfy ``chi``."""
    registry = _registry()
    dep = registry.resolve("const", (1,))
    for fi, (chi, names) in enumerate(_prenex_w_sentences(spec.seed + 29, 20)):
        phi = assemble_putback(chi, [PutbackGroup(dep, tuple(names))])
        for mi, M in enumerate(enumerate_models(min(spec.max_domain, 2), UNARY)):
            cid = f"{fi}:{mi}"

            def case(chi=chi, names=names, phi=phi, M=M, cid=cid):
                rels = list(enumerate_relations(M.size, 1))
                interp = M.interpretation()
                lhs = any(dep_holds(dep, M.elements, frozenset().union(*combo))
                          and sentence_holds(chi, M.elements, {**interp, **dict(zip(names, combo))})
                          for combo in itertools.product(rels, repeat=len(names)))
                rhs = sentence_true(M, phi, registry=registry)
                if M.size < 2 and lhs != rhs:
                    return "na", None
                return _compare(cid, lhs, rhs, structure=M, formula=to_text(chi),
                                assembled=to_text(phi))
            yield cid, case


def pipeline_corpus(seed: int, n: int = 24) -> list[Formula]:
    """Sentences mixing first order literals with constancy atoms."""
    gen = FormulaGenerator(seed, UNARY_POOL, CONST_ATOMS)
    out = []
    while len(out) < n:
        body = gen.formula(3)
        if not any(isinstance(a, DepAtom) for a in _leaves(body)):
            continue
        phi = body
        for v in sorted(phi.free_vars, reverse=True):
            phi = (Forall if gen.rng.random() < 0.5 else Exists)(v, phi)
        out.append(phi)
    return out


def h_pipeline(spec: SweepSpec):
    """End to end: the rewritten sentence agrees with the input on every small model."""
    registry = _registry()
    for fi, phi in enumerate(pipeline_corpus(spec.seed + 31)):
        out = safety_pipeline(phi, {"const"}, registry)
        for mi, M in enumerate(enumerate_models(min(spec.max_domain, 2), UNARY)):
            cid = f"{fi}:{mi}"

            def case(phi=phi, out=out, M=M, cid=cid):
                return _compare(cid, sentence_true(M, phi, registry=registry),
                                sentence_true(M, out, registry=registry),
                                structure=M, formula=phi, rewritten=to_text(out))
            yield cid, case


# -- maximal relations, constancy definitions, relativization ------------------------

def _phi_deps(registry):
    return [registry.resolve("const", (1,)), registry.resolve("dep", (1, 1)),
            registry.resolve("incl", (1, 1)), registry.resolve("nt", (1,))]


def h_phiR(spec: SweepSpec):
    """The sentence holds iff a proper superset of ``R`` satisfies the dependency."""
    registry = _registry()
    for di, dep in enumerate(_phi_deps(registry)):
        phi = build_phi_R(dep)
        for m in range(1, min(spec.max_domain, 2) + 1):
            for ri, R in enumerate(enumerate_relations(m, dep.arity)):
                M = Structure.canonical(m, {"R": (dep.arity, R)})
                cid = f"{di}:{m}:{ri}"

                def case(dep=dep, phi=phi, M=M, R=R, m=m, cid=cid):
                    expected = any(S > R and dep_holds(dep, range(m), S)
                                   for S in enumerate_relations(m, dep.arity))
                    return _compare(cid, expected, sentence_true(M, phi, registry=registry),
                                    structure=M, formula=phi, dependency=dep.label)
                yield cid, case


def h_thetaT(spec: SweepSpec):
    """The sentence holds iff ``T`` extends to a maximal member of the dependency."""
    registry = _registry()
    for di, dep in enumerate(_phi_deps(registry)):
        theta = build_theta_T(dep)
        for m in range(1, min(spec.max_domain, 2) + 1):
            maximal = compute_dmax(dep, range(m))
            for ri, T in enumerate(enumerate_relations(m, dep.arity)):
                M = Structure.canonical(m, {"T": (dep.arity, T)})
                cid = f"{di}:{m}:{ri}"

                def case(theta=theta, M=M, T=T, maximal=maximal, cid=cid, dep=dep):
                    expected = any(T <= K.tuples for K in maximal)
                    return _compare(cid, expected, sentence_true(M, theta, registry=registry),
                                    structure=M, formula=theta, dependency=dep.label)
                yield cid, case
            for ri, R in enumerate(enumerate_relations(m, dep.arity)):
                cid = f"ext:{di}:{m}:{ri}"

                def case(dep=dep, R=R, m=m, maximal=maximal, cid=cid):
                    if not dep_holds(dep, range(m), R):
                        return "na", None
                    ok = any(R <= K.tuples for K in maximal)
                    return ("pass", None) if ok else ("fail", artifact(
                        cid, relation=sorted(R), dependency=dep.label, problem="no maximal extension"))
                yield cid, case


def eq1_cases(registry=None):
    """The two constancy-logic definitions checked by the harness."""
    registry = registry or _registry()
    const = registry.resolve("const", (1,))
    phi_const = build_eq1(const, [Eq1Case(parse_classical("x = z"), ("x",), ("z",))], ("v",))
    empty_dep = fo_dependency("empty", "A x !R(x)", 1)
    phi_empty = build_eq1(empty_dep, [Eq1Case(parse_classical("x != x"), ("x",))], ("v",))
    return [(const, phi_const, DepAtom("const", (("v",),))), (empty_dep, phi_empty, None)]


def h_eq1(spec: SweepSpec):
    """The constructed constancy-logic formula is team equivalent to the atom it defines."""
    registry = _registry()
    for ci, (dep, phi, atom) in enumerate(eq1_cases(registry)):
        for m in range(1, max(spec.max_domain, 3) + 1):
            M = Structure.canonical(m)
            ev = TeamEvaluator(M, registry)
            teams = list(enumerate_teams(m, ("v",), m)) + [Team(("u", "v"))]
            for ti, T in enumerate(teams):
                cid = f"{ci}:{m}:{ti}"

                def case(dep=dep, phi=phi, atom=atom, T=T, M=M, ev=ev, cid=cid):
                    expected = (ev.holds(atom, T) if atom is not None
                                else dep_holds(dep, M.elements, project_team(T, ("v",))))
                    return _compare(cid, expected, ev.holds(phi, T), structure=M, team=T, formula=phi)
                yield cid, case


def h_nt_relativized(spec: SweepSpec):
    """The displayed formula defines non-totality relative to ``P``."""
    registry = _registry()
    nt = registry.resolve("nt", (1,))
    phi = build_nt_relativized()
    for m in range(1, max(spec.max_domain, 3) + 1):
        for pi, P in enumerate(enumerate_relations(m, 1)):
            M = Structure.canonical(m, predicates={"P": {e for (e,) in P}})
            ev = TeamEvaluator(M, registry)
            for ti, T in enumerate(enumerate_teams(m, ("t",), 3)):
                cid = f"{m}:{pi}:{ti}"

                def case(M=M, P=P, T=T, ev=ev, cid=cid):
                    expected = relativized_holds(nt, {e for (e,) in P}, M.elements, T, ("t",))
                    actual = ev.holds(phi, T)
                    if not P and not T.rows and expected != actual:
                        return "na", None
                    return _compare(cid, expected, actual, structure=M, team=T, formula=phi)
                yield cid, case


def h_closed_world_relativize(spec: SweepSpec):
    """For closed-world dependencies, ``P(v) & #D(v)`` defines the relativized dependency."""
    registry = _registry()
    atoms = [DepAtom("const", (("x",),)), DepAtom("dep", (("x",), ("y",))),
             DepAtom("incl", (("x",), ("y",))), DepAtom("indep", (("x",), ("y",), ("x",)))]
    for ai, atom in enumerate(atoms):
        dep = registry.resolve(atom.name, atom.shape)
        variables = atom.args
        phi = relativize_closed_world(dep, "P", variables)
        for m in range(1, min(spec.max_domain, 2) + 1):
            for pi, P in enumerate(enumerate_relations(m, 1)):
                M = Structure.canonical(m, predicates={"P": {e for (e,) in P}})
                ev = TeamEvaluator(M, registry)
                for ti, T in enumerate(enumerate_teams(m, ("x", "y"), 3)):
                    cid = f"{ai}:{m}:{pi}:{ti}"

                    def case(dep=dep, phi=phi, M=M, P=P, T=T, ev=ev, cid=cid, variables=variables):
                        expected = relativized_holds(dep, {e for (e,) in P}, M.elements, T, variables)
                        return _compare(cid, expected, ev.holds(phi, T), structure=M, team=T,
                                        formula=phi)
                    yield cid, case
    for ai, spec_name in enumerate(("nt",)):
        cid = f"not-cw:{ai}"

        def case(cid=cid, spec_name=spec_name):
            verdict = check_closed_world(registry.parse_spec(spec_name), 3)
            return ("pass", None) if not verdict.holds else ("fail", artifact(
                cid, problem=f"{spec_name} unexpectedly closed-world"))
        yield cid, case


def const_obstruction(phi: Formula, M: Structure):
    """Teams on which a first order ``phi`` and ``#const(x)`` differ, or None.

    Singletons satisfy constancy; if ``phi`` holds on two singletons with
    different ``x`` values it holds on their union by flatness, where
    constancy fails.
    """
    ev = TeamEvaluator(M, config=RULES)
    const = DepAtom("const", (("x",),))
    vardom = ("x", "y")
    rows = list(itertools.product(M.elements, repeat=2))
    for r in rows:
        single = Team._raw(vardom, (r,))
        if not ev.holds(phi, single):
            return (single,)
    for r, s in itertools.combinations(rows, 2):
        if r[0] != s[0]:
            pair = Team._raw(vardom, tuple(sorted((r, s))))
            if ev.holds(phi, pair) != ev.holds(const, pair):
                return (Team._raw(vardom, (r,)), Team._raw(vardom, (s,)), pair)
    return None


def h_const_not_flat(spec: SweepSpec):
    """No first order formula of the shallow corpus defines constancy."""
    models = list(enumerate_models(2, SIG, min_size=2))
    for fi, phi in enumerate(shallow_corpus()):
        cid = f"{fi}"

        def case(phi=phi, cid=cid):
            for M in models:
                if const_obstruction(phi, M) is None:
                    return "fail", artifact(cid, M, None, phi, problem="no obstruction found")
            return "pass", None
        yield cid, case


# -- registry and runner -------------------------------------------------------------

HARNESSES: dict[str, Callable] = {
    "flatness": h_flatness,
    "locality": h_locality,
    "closure-transfer": h_closure_transfer,
    "sugar-selimp": h_sugar_selimp,
    "sugar-booldisj": h_sugar_booldisj,
    "positive-upwards": h_positive_upwards,
    "extraction": h_extraction,
    "singleocc": h_singleocc,
    "dep-union": h_dep_union,
    "qfree-putback": h_qfree_putback,
    "putback-sentence": h_putback_sentence,
    "pipeline": h_pipeline,
    "phiR": h_phiR,
    "thetaT": h_thetaT,
    "eq1": h_eq1,
    "nt-relativized": h_nt_relativized,
    "closed-world-relativize": h_closed_world_relativize,
    "const-not-flat": h_const_not_flat,
}

# Operations exercised by each harness.
COVERAGE = {
    "flatness": ["team_eval", "tarski_eval", "sentence_true", "project_team", "enumerate_teams"],
    "locality": ["team_eval", "restrict_team", "free_vars"],
    "closure-transfer": ["team_eval", "check_closure"],
    "sugar-selimp": ["team_eval", "select_team", "desugar"],
    "sugar-booldisj": ["team_eval", "desugar"],
    "positive-upwards": ["team_eval", "check_positive"],
    "extraction": ["extract_atoms"],
    "singleocc": ["split_occurrences"],
    "dep-union": ["build_dep_union", "duplicate", "supplement"],
    "qfree-putback": ["put_back_qfree", "enumerate_lax_supplements"],
    "putback-sentence": ["assemble_putback", "to_prenex"],
    "pipeline": ["safety_pipeline"],
    "phiR": ["build_phi_R"],
    "thetaT": ["build_theta_T", "compute_dmax"],
    "eq1": ["build_eq1", "substitute_relation"],
    "nt-relativized": ["build_nt_relativized", "relativized_holds"],
    "closed-world-relativize": ["relativized_holds", "check_closed_world"],
    "const-not-flat": ["team_eval"],
}


def _resolve(name: str) -> Callable:
    try:
        return HARNESSES[name]
    except KeyError:
        raise VerifyError(f"unknown harness {name!r}; choose from {', '.join(HARNESSES)}") from None


def _run_shard(name: str, spec: SweepSpec, shard: int, shards: int) -> Report:
    report = Report(name)
    start = time.perf_counter()
    for i, (cid, thunk) in enumerate(_resolve(name)(spec)):
        if spec.budget is not None and i >= spec.budget:
            report.notes.append(f"stopped at case budget {spec.budget}")
            break
        if i % shards != shard:
            continue
        verdict, art = thunk()
        report.cases.append((cid, verdict))
        if art is not None:
            art.setdefault("harness", name)
            report.failures.append(art)
    report.seconds = time.perf_counter() - start
    return report


def run_harness(name: str, spec: SweepSpec | None = None) -> Report:
    """Run one harness, splitting cases over ``spec.jobs`` worker processes."""
    spec = spec or SweepSpec()
    _resolve(name)
    if spec.jobs <= 1:
        report = _run_shard(name, spec, 0, 1)
    else:
        with ProcessPoolExecutor(spec.jobs) as pool:
            parts = list(pool.map(_run_shard, [name] * spec.jobs, [spec] * spec.jobs,
                                  range(spec.jobs), [spec.jobs] * spec.jobs))
        report = parts[0]
        for p in parts[1:]:
            report = report.merge(p)
    if name == "dep-union" and report.count("na"):
        report.notes.append("one-element models are outside the hypothesis of the union formula")
    if name == "qfree-putback" and report.count("na"):
        report.notes.append("put-back needs two distinct values for v and w; "
                            "one-element mismatches are recorded as na")
    if name == "sugar-booldisj":
        report.notes.append("constancy encoding of ++ needs two distinct elements; "
                            "one-element models are recorded as na")
    return report.canonicalize()


def recheck(name: str, case_id: str, spec: SweepSpec | None = None):
    """Re-run a single case by id; returns ``(verdict, artifact)``."""
    spec = spec or SweepSpec()
    for cid, thunk in _resolve(name)(spec):
        if cid == case_id:
            return thunk()
    raise VerifyError(f"harness {name} has no case {case_id!r}")
