"""Tarskian evaluation of classical formulas.

Formulas are compiled to Python closures once per (formula, variable
layout); binding a compiled formula to a domain and an interpretation is
cheap, so the same code object serves every model of a sweep.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, Sequence

from .model import Structure
from .syntax import (Classical, FAnd, FAtom, FEq, FExists, FForall, FImplies, FNot, FOr,
                     Formula, FormulaError, relation_symbols, to_classical)


class EvaluationError(ValueError):
    """Unbound variable, unknown symbol or similar evaluation-time problem."""


def _flatten(node, cls):
    out, stack = [], [node]
    while stack:
        n = stack.pop()
        if isinstance(n, cls):
            stack.append(n.right)
            stack.append(n.left)
        else:
            out.append(n)
    return out


class _CodeGen:
    def __init__(self, symbols: Sequence[str]):
        self.rel = {s: f"_r{i}" for i, s in enumerate(symbols)}
        self.counter = itertools.count()

    def fresh(self) -> str:
        return f"v{next(self.counter)}"

    def expr(self, n: Classical, env: dict) -> str:
        if isinstance(n, FAtom):
            args = [self.var(a, env) for a in n.args]
            tup = f"({args[0]},)" if len(args) == 1 else f"({', '.join(args)})"
            return f"({tup} in {self.rel[n.sym]})"
        if isinstance(n, FEq):
            return f"({self.var(n.left, env)} == {self.var(n.right, env)})"
        if isinstance(n, FNot):
            return f"(not {self.expr(n.body, env)})"
        if isinstance(n, FAnd):
            return "(" + " and ".join(self.expr(c, env) for c in _flatten(n, FAnd)) + ")"
        if isinstance(n, FOr):
            return "(" + " or ".join(self.expr(c, env) for c in _flatten(n, FOr)) + ")"
        if isinstance(n, FImplies):
            return f"((not {self.expr(n.left, env)}) or {self.expr(n.right, env)})"
        if isinstance(n, (FExists, FForall)):
            name = self.fresh()
            inner = dict(env)
            inner[n.var] = name
            body = self.expr(n.body, inner)
            fn = "any" if isinstance(n, FExists) else "all"
            return f"{fn}({body} for {name} in D)"
        raise TypeError(f"not a classical formula: {n!r}")

    @staticmethod
    def var(v: str, env: dict) -> str:
        try:
            return env[v]
        except KeyError:
            raise EvaluationError(f"unbound variable {v!r}") from None


_FACTORIES: dict = {}


def _factory(phi: Classical, layout: tuple[str, ...]):
    key = (phi, layout)
    hit = _FACTORIES.get(key)
    if hit is not None:
        return hit
    symbols = tuple(sorted(relation_symbols(phi)))
    gen = _CodeGen(symbols)
    env = {}
    lines = []
    for i, v in enumerate(layout):
        if v in phi.free_vars and v not in env:
            env[v] = gen.fresh()
            lines.append(f"        {env[v]} = row[{i}]")
    missing = phi.free_vars - set(layout)
    if missing:
        raise EvaluationError(f"unbound variable(s) {sorted(missing)}")
    body = gen.expr(phi, env)
    params = ", ".join(["D"] + [gen.rel[s] for s in symbols])
    src = (f"def _make({params}):\n    def _f(row):\n" + "\n".join(lines)
           + ("\n" if lines else "") + f"        return {body}\n    return _f\n")
    ns: dict = {}
    exec(compile(src, "<formula>", "exec"), ns)
    entry = (ns["_make"], symbols)
    if len(_FACTORIES) > 50000:
        _FACTORIES.clear()
    _FACTORIES[key] = entry
    return entry


def compile_classical(phi: Classical, layout: Sequence[str], domain: Iterable,
                      interp: Mapping[str, frozenset]) -> Callable[[tuple], bool]:
    """A predicate on rows laid out as ``layout`` for the given interpretation."""
    make, symbols = _factory(phi, tuple(layout))
    try:
        rels = [interp[s] for s in symbols]
    except KeyError as exc:
        raise EvaluationError(f"unknown relation symbol {exc.args[0]!r}") from None
    return make(tuple(domain), *rels)


def _check_arities(phi: Classical, structure: Structure):
    for sym, k in relation_symbols(phi).items():
        try:
            arity = structure.arity(sym)
        except ValueError:
            raise EvaluationError(f"unknown relation symbol {sym!r}") from None
        if arity != k:
            raise EvaluationError(f"relation {sym} has arity {arity}, used with {k}")


def row_predicate(structure: Structure, phi, layout: Sequence[str]) -> Callable[[tuple], bool]:
    """Compile a first order formula (classical or team) into a row test."""
    if isinstance(phi, Formula):
        try:
            phi = to_classical(phi)
        except FormulaError as exc:
            raise EvaluationError(f"selection formula must be first order: {exc.message}") from None
    _check_arities(phi, structure)
    return compile_classical(phi, layout, structure.elements, structure.interpretation())


def tarski_eval(structure: Structure, assignment: Mapping[str, int], phi: Classical) -> bool:
    """Standard Tarskian truth of ``phi`` under ``assignment``."""
    if isinstance(phi, Formula):
        phi = to_classical(phi)
    layout = tuple(sorted(assignment))
    for v, e in assignment.items():
        if not 0 <= e < structure.size:
            raise EvaluationError(f"value of {v!r} is outside the domain")
    pred = row_predicate(structure, phi, layout)
    return pred(tuple(assignment[v] for v in layout))


def sentence_holds(phi: Classical, domain: Iterable, interp: Mapping[str, frozenset]) -> bool:
    """Truth of a sentence over an arbitrary element set (possibly empty)."""
    return compile_classical(phi, (), domain, interp)(())
