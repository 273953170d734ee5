"""Formula corpora: exhaustive shallow enumeration and seeded random generation."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from .syntax import (And, BoolDisj, DepAtom, EqLit, Exists, FAtom, FEq, FNot, FAnd, FOr, FExists,
                     FForall, Forall, Formula, Or, RelLit, SelImp)

VARS = ("x", "y")
BASE_POOL = (RelLit("R", ("x", "y")), RelLit("R", ("y", "x"), False),
             EqLit("x", "y"), EqLit("x", "y", False))


def literals(signature: dict[str, int], variables: Sequence[str] = VARS) -> list[Formula]:
    """Every relational and equality literal over ``variables``."""
    out = []
    for sym in sorted(signature):
        for args in itertools.product(variables, repeat=signature[sym]):
            out.append(RelLit(sym, args))
            out.append(RelLit(sym, args, False))
    for a, b in itertools.combinations(variables, 2):
        out.append(EqLit(a, b))
        out.append(EqLit(a, b, False))
    return out


def shallow_corpus(pool: Sequence[Formula] = BASE_POOL, variables: Sequence[str] = VARS) -> list[Formula]:
    """All formulas of depth at most two over ``pool``.

    Depth one combines two pool members (unordered) or quantifies one.
    Depth two quantifies a depth one formula or combines it with a pool
    member.
    """
    pool = list(pool)
    depth1 = []
    for a, b in itertools.combinations_with_replacement(pool, 2):
        depth1.append(And(a, b))
        depth1.append(Or(a, b))
    for q in (Exists, Forall):
        for v in variables:
            depth1.extend(q(v, a) for a in pool)
    depth2 = []
    for q in (Exists, Forall):
        for v in variables:
            depth2.extend(q(v, f) for f in depth1)
    for f in depth1:
        for a in pool:
            depth2.append(And(f, a))
            depth2.append(Or(a, f))
    return _dedupe(pool + depth1 + depth2)


def _dedupe(items):
    seen, out = set(), []
    for f in items:
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


class FormulaGenerator:
    """Seeded random team formulas.

    ``atoms`` are extra leaves (dependency atoms, say); ``sugar`` enables
    selective implication with a literal condition and Boolean disjunction.
    """

    def __init__(self, seed: int, pool: Sequence[Formula], atoms: Sequence[Formula] = (),
                 variables: Sequence[str] = VARS, sugar: bool = False, leaf_bias: float = 0.3):
        self.rng = random.Random(seed)
        self.pool = list(pool)
        self.atoms = list(atoms)
        self.variables = list(variables)
        self.sugar = sugar
        self.leaf_bias = leaf_bias

    def leaf(self) -> Formula:
        if self.atoms and self.rng.random() < 0.4:
            return self.rng.choice(self.atoms)
        return self.rng.choice(self.pool)

    def formula(self, depth: int) -> Formula:
        rng = self.rng
        if depth == 0 or rng.random() < self.leaf_bias:
            return self.leaf()
        kinds = ["and", "or", "exists", "forall"]
        if self.sugar:
            kinds += ["selimp", "booldisj"]
        kind = rng.choice(kinds)
        if kind in ("exists", "forall"):
            cls = Exists if kind == "exists" else Forall
            return cls(rng.choice(self.variables), self.formula(depth - 1))
        if kind == "selimp":
            cond = self.classical(min(depth - 1, 1))
            return SelImp(cond, self.formula(depth - 1))
        cls = {"and": And, "or": Or, "booldisj": BoolDisj}[kind]
        return cls(self.formula(depth - 1), self.formula(depth - 1))

    def classical(self, depth: int):
        lit = self.rng.choice(self.pool)
        node = FAtom(lit.sym, lit.args) if isinstance(lit, RelLit) else FEq(lit.left, lit.right)
        if not lit.positive:
            node = FNot(node)
        if depth > 0 and self.rng.random() < 0.5:
            other = self.classical(depth - 1)
            node = self.rng.choice([FAnd, FOr])(node, other)
        return node

    def many(self, n: int, depth: int) -> list[Formula]:
        return [self.formula(depth) for _ in range(n)]


def random_corpus(seed: int, n: int, depth: int, pool: Sequence[Formula] = BASE_POOL,
                  atoms: Sequence[Formula] = (), sugar: bool = False) -> list[Formula]:
    return FormulaGenerator(seed, pool, atoms, sugar=sugar).many(n, depth)


def random_sentence(rng: random.Random, depth: int, unary: Sequence[str], variables=("x", "y"),
                    positive: Sequence[str] = ()) -> "FAnd":
    """A random classical sentence over unary symbols.

    Symbols in ``positive`` only occur unnegated (and never under an
    implication), as needed by the occurrence-splitting sweeps.
    """
    def body(d, bound):
        if d == 0 or not bound or rng.random() < 0.25:
            if not bound:
                v = rng.choice(variables)
                return FExists(v, body(d, [v])) if rng.random() < 0.5 else FForall(v, body(d, [v]))
            sym = rng.choice(list(unary) + ["="])
            if sym == "=":
                a, b = rng.choice(bound), rng.choice(bound)
                atom = FEq(a, b)
                return FNot(atom) if rng.random() < 0.5 else atom
            atom = FAtom(sym, (rng.choice(bound),))
            if sym in positive or rng.random() < 0.5:
                return atom
            return FNot(atom)
        kind = rng.choice(["and", "or", "q"])
        if kind == "q":
            v = rng.choice(variables)
            cls = rng.choice([FExists, FForall])
            return cls(v, body(d - 1, sorted(set(bound) | {v})))
        cls = FAnd if kind == "and" else FOr
        return cls(body(d - 1, bound), body(d - 1, bound))

    return body(depth, [])
