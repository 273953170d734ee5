"""Formula ASTs, parser, printer and syntactic analyses.

Two separate trees are used.  Team formulas (``And``, ``Or``, ``RelLit`` ...)
are in negation normal form by construction: negation only appears as the
polarity flag of a literal.  Classical formulas (``FAnd``, ``FNot`` ...)
carry full negation and implication and never contain dependency atoms.

Grammar (ASCII, lowest precedence first)::

    phi  := unit ( ('~>' | '++' | '->') phi )?      right associative
    disj := conj ('|' conj)*
    conj := unit ('&' unit)*
    unit := 'E' var unit | 'A' var unit | '~' unit | '(' phi ')' | lit | dep
    lit  := ['!'] SYM '(' vars ')' | var '=' var | var '!=' var
    dep  := '#' NAME '(' vars (';' vars)* ')'

``~>`` and ``++`` only occur in team formulas, ``~`` and ``->`` only in
classical ones (and on the left of ``~>``, which is classical).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, fields
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence

RESERVED = frozenset({"E", "A"})
FRESH_PREFIX = "_"


class FormulaError(ValueError):
    """Syntax or well-formedness error, optionally with a source position."""

    def __init__(self, message: str, pos: tuple[int, int] | None = None):
        self.message = message
        self.pos = pos
        where = f"line {pos[0]}, column {pos[1]}: " if pos else ""
        super().__init__(where + message)


# -- AST base ----------------------------------------------------------------

class Node:
    """Shared equality, hashing and printing for both ASTs.

    Equality ignores source positions.  Hashes are cached because nodes key
    memo tables and compile caches.
    """

    def _key(self):
        k = self.__dict__.get("_key_cache")
        if k is None:
            k = (type(self).__name__,) + tuple(
                getattr(self, f.name) for f in fields(self) if f.compare)
            self.__dict__["_key_cache"] = k
        return k

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        h = self.__dict__.get("_hash_cache")
        if h is None:
            h = hash(self._key())
            self.__dict__["_hash_cache"] = h
        return h

    def __str__(self):
        return to_text(self)

    def children(self) -> tuple["Node", ...]:
        return ()


def _node(cls):
    return dataclass(frozen=True, eq=False, repr=True)(cls)


def _pos():
    return field(default=None, compare=False, repr=False, kw_only=True)


# -- team formulas (NNF) -----------------------------------------------------

class Formula(Node):
    """A team formula."""

    @cached_property
    def free_vars(self) -> frozenset:
        return free_vars(self)


@_node
class RelLit(Formula):
    sym: str
    args: tuple[str, ...]
    positive: bool = True
    pos: tuple | None = _pos()


@_node
class EqLit(Formula):
    left: str
    right: str
    positive: bool = True
    pos: tuple | None = _pos()


@_node
class DepAtom(Formula):
    name: str
    groups: tuple[tuple[str, ...], ...]
    pos: tuple | None = _pos()

    @property
    def args(self) -> tuple[str, ...]:
        return tuple(v for g in self.groups for v in g)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)


@_node
class And(Formula):
    left: Formula
    right: Formula
    pos: tuple | None = _pos()

    def children(self):
        return (self.left, self.right)


@_node
class Or(Formula):
    left: Formula
    right: Formula
    pos: tuple | None = _pos()

    def children(self):
        return (self.left, self.right)


@_node
class Exists(Formula):
    var: str
    body: Formula
    pos: tuple | None = _pos()

    def children(self):
        return (self.body,)


@_node
class Forall(Formula):
    var: str
    body: Formula
    pos: tuple | None = _pos()

    def children(self):
        return (self.body,)


@_node
class SelImp(Formula):
    """Selective implication: ``body`` evaluated on the rows selected by ``cond``."""

    cond: "Classical"
    body: Formula
    pos: tuple | None = _pos()

    def children(self):
        return (self.cond, self.body)


@_node
class BoolDisj(Formula):
    """Boolean disjunction: the whole team satisfies one side or the other."""

    left: Formula
    right: Formula
    pos: tuple | None = _pos()

    def children(self):
        return (self.left, self.right)


# -- classical formulas ------------------------------------------------------

class Classical(Node):
    """A first order formula with unrestricted negation."""

    @cached_property
    def free_vars(self) -> frozenset:
        return free_vars(self)


@_node
class FAtom(Classical):
    sym: str
    args: tuple[str, ...]
    pos: tuple | None = _pos()


@_node
class FEq(Classical):
    left: str
    right: str
    pos: tuple | None = _pos()


@_node
class FNot(Classical):
    body: Classical
    pos: tuple | None = _pos()

    def children(self):
        return (self.body,)


@_node
class FAnd(Classical):
    left: Classical
    right: Classical
    pos: tuple | None = _pos()

    def children(self):
        return (self.left, self.right)


@_node
class FOr(Classical):
    left: Classical
    right: Classical
    pos: tuple | None = _pos()

    def children(self):
        return (self.left, self.right)


@_node
class FImplies(Classical):
    left: Classical
    right: Classical
    pos: tuple | None = _pos()

    def children(self):
        return (self.left, self.right)


@_node
class FExists(Classical):
    var: str
    body: Classical
    pos: tuple | None = _pos()

    def children(self):
        return (self.body,)


@_node
class FForall(Classical):
    var: str
    body: Classical
    pos: tuple | None = _pos()

    def children(self):
        return (self.body,)


QUANTIFIERS = (Exists, Forall, FExists, FForall)


# -- small constructors ------------------------------------------------------

def conj(parts: Iterable[Formula]) -> Formula | None:
    """Left-nested conjunction of ``parts``; ``None`` when empty."""
    out = None
    for p in parts:
        out = p if out is None else And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula | None:
    out = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return out


def fconj(parts: Iterable[Classical]) -> Classical | None:
    out = None
    for p in parts:
        out = p if out is None else FAnd(out, p)
    return out


def fdisj(parts: Iterable[Classical]) -> Classical | None:
    out = None
    for p in parts:
        out = p if out is None else FOr(out, p)
    return out


def exists_block(variables: Sequence[str], body):
    cls = FExists if isinstance(body, Classical) else Exists
    for v in reversed(variables):
        body = cls(v, body)
    return body


def forall_block(variables: Sequence[str], body):
    cls = FForall if isinstance(body, Classical) else Forall
    for v in reversed(variables):
        body = cls(v, body)
    return body


def tuple_eq(left: Sequence[str], right: Sequence[str]) -> Formula:
    """``left = right`` componentwise, as a team conjunction."""
    if len(left) != len(right) or not left:
        raise FormulaError("tuple equality needs two nonempty tuples of equal length")
    return conj(EqLit(a, b) for a, b in zip(left, right))


def ftuple_eq(left: Sequence[str], right: Sequence[str]) -> Classical:
    if len(left) != len(right) or not left:
        raise FormulaError("tuple equality needs two nonempty tuples of equal length")
    return fconj(FEq(a, b) for a, b in zip(left, right))


def ftuple_neq(left: Sequence[str], right: Sequence[str]) -> Classical:
    return fdisj(FNot(FEq(a, b)) for a, b in zip(left, right))


# -- traversal ---------------------------------------------------------------

def walk(node: Node) -> Iterator[Node]:
    """Preorder traversal, descending into selective-implication conditions."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children()))


def free_vars(node: Node) -> frozenset:
    if isinstance(node, (RelLit, FAtom)):
        return frozenset(node.args)
    if isinstance(node, (EqLit, FEq)):
        return frozenset((node.left, node.right))
    if isinstance(node, DepAtom):
        return frozenset(node.args)
    if isinstance(node, QUANTIFIERS):
        return node.body.free_vars - {node.var}
    out = frozenset()
    for c in node.children():
        out |= c.free_vars
    return out


def all_vars(node: Node) -> set[str]:
    """Every variable name occurring in ``node``, free or bound."""
    out = set()
    for n in walk(node):
        if isinstance(n, (RelLit, FAtom, DepAtom)):
            out.update(n.args)
        elif isinstance(n, (EqLit, FEq)):
            out.update((n.left, n.right))
        elif isinstance(n, QUANTIFIERS):
            out.add(n.var)
    return out


def relation_symbols(node: Node) -> dict[str, int]:
    """Relation symbols with their arities."""
    out = {}
    for n in walk(node):
        if isinstance(n, (RelLit, FAtom)):
            if out.setdefault(n.sym, len(n.args)) != len(n.args):
                raise FormulaError(f"relation {n.sym} used with different arities", n.pos)
    return out


def dep_atoms(node: Node) -> list[DepAtom]:
    return [n for n in walk(node) if isinstance(n, DepAtom)]


def is_first_order(node: Node) -> bool:
    """No dependency atoms and no Boolean disjunction anywhere."""
    return not any(isinstance(n, (DepAtom, BoolDisj)) for n in walk(node))


def is_sugar_free(node: Node) -> bool:
    return not any(isinstance(n, (SelImp, BoolDisj)) for n in walk(node))


def is_quantifier_free(node: Node) -> bool:
    return not any(isinstance(n, QUANTIFIERS) for n in walk(node))


def is_sentence(node: Node) -> bool:
    return not node.free_vars


class FreshNames:
    """Generator of names in the reserved ``_`` namespace avoiding a used set."""

    def __init__(self, used: Iterable[str] = ()):
        self.used = set(used)
        self._counter = itertools.count(1)

    def __call__(self, hint: str = "v") -> str:
        hint = hint.lstrip(FRESH_PREFIX) or "v"
        while True:
            name = f"{FRESH_PREFIX}{hint}{next(self._counter)}"
            if name not in self.used:
                self.used.add(name)
                return name

    def many(self, hint: str, n: int) -> tuple[str, ...]:
        return tuple(self(hint) for _ in range(n))


def used_names(*nodes: Node) -> set[str]:
    """All variable and relation names in the given nodes."""
    out = set()
    for node in nodes:
        out |= all_vars(node)
        out |= set(relation_symbols(node))
    return out


# -- lexer -------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n)
  | (?P<op>~>|\+\+|->|!=|[()\[\],;=!~|&\#])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: tuple[int, int]


def _tokenize(text: str) -> list[_Tok]:
    toks, i, line, col = [], 0, 1, 1
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise FormulaError(f"unexpected character {text[i]!r}", (line, col))
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind != "ws":
                toks.append(_Tok(kind, s, (line, col)))
            col += len(s)
        i = m.end()
    toks.append(_Tok("eof", "", (line, col)))
    return toks


# -- parser ------------------------------------------------------------------
# The parser builds a neutral tree of tuples ("raw"); lowering turns it into
# a team or a classical AST and reports mode-specific errors.

class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            found = t.text or "end of input"
            raise FormulaError(f"expected {text!r}, found {found!r}", t.pos)
        return t

    def parse(self):
        node = self.formula()
        t = self.peek()
        if t.kind != "eof":
            raise FormulaError(f"unexpected {t.text!r}", t.pos)
        return node

    def formula(self):
        left = self.disjunction()
        t = self.peek()
        if t.text in ("~>", "++", "->"):
            self.next()
            right = self.formula()
            kind = {"~>": "selimp", "++": "bdisj", "->": "imp"}[t.text]
            return (kind, left, right, t.pos)
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek().text == "|":
            t = self.next()
            left = ("or", left, self.conjunction(), t.pos)
        return left

    def conjunction(self):
        left = self.unit()
        while self.peek().text == "&":
            t = self.next()
            left = ("and", left, self.unit(), t.pos)
        return left

    def variable(self) -> str:
        t = self.next()
        if t.kind != "ident":
            raise FormulaError(f"expected a variable, found {t.text or 'end of input'!r}", t.pos)
        if t.text in RESERVED:
            raise FormulaError(f"{t.text!r} is reserved for quantifiers", t.pos)
        return t.text

    def unit(self):
        t = self.peek()
        if t.kind == "ident" and t.text in RESERVED:
            self.next()
            var = self.variable()
            return ("ex" if t.text == "E" else "all", var, self.unit(), t.pos)
        if t.text == "~":
            self.next()
            return ("not", self.unit(), t.pos, "~")
        if t.text == "(":
            self.next()
            node = self.formula()
            self.expect(")")
            return node
        if t.text == "!":
            self.next()
            nxt = self.peek()
            if nxt.text == "#":
                return ("not", self.dependency(), t.pos, "!")
            if nxt.kind == "ident" and self.peek(1).text == "(":
                return ("not", self.relation(), t.pos, "!")
            raise FormulaError("'!' must precede a relation or dependency atom", t.pos)
        if t.text == "#":
            return self.dependency()
        if t.kind == "ident":
            if self.peek(1).text == "(":
                return self.relation()
            left = self.variable()
            op = self.next()
            if op.text not in ("=", "!="):
                raise FormulaError(f"expected '=' or '!=' after {left!r}", op.pos)
            right = self.variable()
            return ("eq" if op.text == "=" else "neq", left, right, t.pos)
        raise FormulaError(f"unexpected {t.text or 'end of input'!r}", t.pos)

    def var_list(self, closers: str) -> tuple[str, ...]:
        out = []
        if self.peek().text in closers:
            return ()
        out.append(self.variable())
        while self.peek().text == ",":
            self.next()
            out.append(self.variable())
        return tuple(out)

    def relation(self):
        t = self.next()
        if t.text in RESERVED:
            raise FormulaError(f"{t.text!r} is reserved for quantifiers", t.pos)
        self.expect("(")
        args = self.var_list(")")
        if not args:
            raise FormulaError(f"relation {t.text} needs at least one argument", t.pos)
        self.expect(")")
        return ("rel", t.text, args, t.pos)

    def dependency(self):
        start = self.expect("#")
        name = self.next()
        if name.kind != "ident":
            raise FormulaError("expected a dependency name after '#'", name.pos)
        self.expect("(")
        groups = [self.var_list(";)")]
        while self.peek().text == ";":
            self.next()
            groups.append(self.var_list(";)"))
        self.expect(")")
        return ("dep", name.text, tuple(groups), start.pos)


def _lower_team(raw) -> Formula:
    kind = raw[0]
    if kind == "rel":
        return RelLit(raw[1], raw[2], True, pos=raw[3])
    if kind == "eq":
        return EqLit(raw[1], raw[2], True, pos=raw[3])
    if kind == "neq":
        return EqLit(raw[1], raw[2], False, pos=raw[3])
    if kind == "dep":
        return DepAtom(raw[1], raw[2], pos=raw[3])
    if kind == "not":
        inner, pos, how = raw[1], raw[2], raw[3]
        if how == "~":
            raise FormulaError("classical negation '~' is not allowed in team formulas "
                               "(only on the left of '~>')", pos)
        if inner[0] == "dep":
            raise FormulaError("negated dependency atom", pos)
        return RelLit(inner[1], inner[2], False, pos=pos)
    if kind in ("and", "or", "bdisj"):
        cls = {"and": And, "or": Or, "bdisj": BoolDisj}[kind]
        return cls(_lower_team(raw[1]), _lower_team(raw[2]), pos=raw[3])
    if kind in ("ex", "all"):
        cls = Exists if kind == "ex" else Forall
        return cls(raw[1], _lower_team(raw[2]), pos=raw[3])
    if kind == "selimp":
        return SelImp(_lower_classical(raw[1]), _lower_team(raw[2]), pos=raw[3])
    if kind == "imp":
        raise FormulaError("'->' is only allowed in classical formulas", raw[3])
    raise AssertionError(kind)


def _lower_classical(raw) -> Classical:
    kind = raw[0]
    if kind == "rel":
        return FAtom(raw[1], raw[2], pos=raw[3])
    if kind == "eq":
        return FEq(raw[1], raw[2], pos=raw[3])
    if kind == "neq":
        return FNot(FEq(raw[1], raw[2], pos=raw[3]), pos=raw[3])
    if kind == "dep":
        raise FormulaError("dependency atoms are not allowed in classical formulas", raw[3])
    if kind == "not":
        return FNot(_lower_classical(raw[1]), pos=raw[2])
    if kind in ("and", "or", "imp"):
        cls = {"and": FAnd, "or": FOr, "imp": FImplies}[kind]
        return cls(_lower_classical(raw[1]), _lower_classical(raw[2]), pos=raw[3])
    if kind in ("ex", "all"):
        cls = FExists if kind == "ex" else FForall
        return cls(raw[1], _lower_classical(raw[2]), pos=raw[3])
    if kind == "selimp":
        raise FormulaError("'~>' is only allowed in team formulas", raw[3])
    if kind == "bdisj":
        raise FormulaError("'++' is only allowed in team formulas", raw[3])
    raise AssertionError(kind)


def parse_formula(text: str, mode: str = "team", registry=None):
    """Parse ``text`` as a team formula (``mode='team'``) or a classical one.

    With a dependency ``registry`` every dependency atom is resolved, so
    unknown names and wrong group shapes are reported at parse time.
    """
    if mode not in ("team", "classical"):
        raise ValueError(f"unknown mode {mode!r}")
    raw = _Parser(text).parse()
    node = _lower_team(raw) if mode == "team" else _lower_classical(raw)
    relation_symbols(node)
    if registry is not None:
        for atom in dep_atoms(node):
            try:
                registry.resolve(atom.name, atom.shape)
            except (KeyError, ValueError) as exc:
                raise FormulaError(str(exc.args[0] if exc.args else exc), atom.pos) from None
    return node


def parse_team(text: str, registry=None) -> Formula:
    return parse_formula(text, "team", registry)


def parse_classical(text: str) -> Classical:
    return parse_formula(text, "classical")


# -- printer -----------------------------------------------------------------

_LEVEL_IMP, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNIT = 0, 1, 2, 3


def _level(node: Node) -> int:
    if isinstance(node, (SelImp, BoolDisj, FImplies)):
        return _LEVEL_IMP
    if isinstance(node, (Or, FOr)):
        return _LEVEL_OR
    if isinstance(node, (And, FAnd)):
        return _LEVEL_AND
    return _LEVEL_UNIT


def _wrap(node: Node, need: bool) -> str:
    s = to_text(node)
    return f"({s})" if need else s


def to_text(node: Node) -> str:
    """Canonical text; parsing it gives back an equal AST."""
    if isinstance(node, RelLit):
        return ("" if node.positive else "!") + f"{node.sym}({','.join(node.args)})"
    if isinstance(node, FAtom):
        return f"{node.sym}({','.join(node.args)})"
    if isinstance(node, EqLit):
        return f"{node.left} {'=' if node.positive else '!='} {node.right}"
    if isinstance(node, FEq):
        return f"{node.left} = {node.right}"
    if isinstance(node, DepAtom):
        return f"#{node.name}({';'.join(','.join(g) for g in node.groups)})"
    if isinstance(node, FNot):
        b = node.body
        if isinstance(b, FAtom):
            return "!" + to_text(b)
        if isinstance(b, FEq):
            return f"{b.left} != {b.right}"
        return "~" + _wrap(b, _level(b) < _LEVEL_UNIT)
    if isinstance(node, QUANTIFIERS):
        q = "E" if isinstance(node, (Exists, FExists)) else "A"
        return f"{q} {node.var} " + _wrap(node.body, _level(node.body) < _LEVEL_UNIT)
    level = _level(node)
    if level == _LEVEL_IMP:
        op = {SelImp: "~>", BoolDisj: "++", FImplies: "->"}[type(node)]
        left, right = (node.cond, node.body) if isinstance(node, SelImp) else (node.left, node.right)
        return f"{_wrap(left, _level(left) <= level)} {op} {_wrap(right, _level(right) < level)}"
    op = "|" if level == _LEVEL_OR else "&"
    return f"{_wrap(node.left, _level(node.left) < level)} {op} {_wrap(node.right, _level(node.right) <= level)}"


# -- conversions -------------------------------------------------------------

def to_nnf(phi: Classical, negate: bool = False) -> Formula:
    """Negation normal form of a classical formula, as a team formula."""
    if isinstance(phi, FAtom):
        return RelLit(phi.sym, phi.args, not negate)
    if isinstance(phi, FEq):
        return EqLit(phi.left, phi.right, not negate)
    if isinstance(phi, FNot):
        return to_nnf(phi.body, not negate)
    if isinstance(phi, FAnd):
        cls = Or if negate else And
        return cls(to_nnf(phi.left, negate), to_nnf(phi.right, negate))
    if isinstance(phi, FOr):
        cls = And if negate else Or
        return cls(to_nnf(phi.left, negate), to_nnf(phi.right, negate))
    if isinstance(phi, FImplies):
        if negate:
            return And(to_nnf(phi.left, False), to_nnf(phi.right, True))
        return Or(to_nnf(phi.left, True), to_nnf(phi.right, False))
    if isinstance(phi, FExists):
        return (Forall if negate else Exists)(phi.var, to_nnf(phi.body, negate))
    if isinstance(phi, FForall):
        return (Exists if negate else Forall)(phi.var, to_nnf(phi.body, negate))
    raise TypeError(f"not a classical formula: {phi!r}")


def to_classical(phi: Formula) -> Classical:
    """The classical reading of a first order team formula.

    Selective implication with a first order body is flat, so it reads as
    ``cond -> body``.  Dependency atoms and Boolean disjunction are refused.
    """
    if isinstance(phi, Classical):
        return phi
    if isinstance(phi, RelLit):
        a = FAtom(phi.sym, phi.args)
        return a if phi.positive else FNot(a)
    if isinstance(phi, EqLit):
        a = FEq(phi.left, phi.right)
        return a if phi.positive else FNot(a)
    if isinstance(phi, DepAtom):
        raise FormulaError(f"dependency atom {to_text(phi)} has no classical reading", phi.pos)
    if isinstance(phi, BoolDisj):
        raise FormulaError("Boolean disjunction has no classical reading", phi.pos)
    if isinstance(phi, And):
        return FAnd(to_classical(phi.left), to_classical(phi.right))
    if isinstance(phi, Or):
        return FOr(to_classical(phi.left), to_classical(phi.right))
    if isinstance(phi, Exists):
        return FExists(phi.var, to_classical(phi.body))
    if isinstance(phi, Forall):
        return FForall(phi.var, to_classical(phi.body))
    if isinstance(phi, SelImp):
        return FImplies(phi.cond, to_classical(phi.body))
    raise TypeError(f"not a team formula: {phi!r}")


def nnf_classical(phi: Classical, negate: bool = False) -> Classical:
    """Classical NNF: ``FNot`` only directly on atoms, no implications."""
    if isinstance(phi, (FAtom, FEq)):
        return FNot(phi) if negate else phi
    if isinstance(phi, FNot):
        return nnf_classical(phi.body, not negate)
    if isinstance(phi, FAnd):
        cls = FOr if negate else FAnd
        return cls(nnf_classical(phi.left, negate), nnf_classical(phi.right, negate))
    if isinstance(phi, FOr):
        cls = FAnd if negate else FOr
        return cls(nnf_classical(phi.left, negate), nnf_classical(phi.right, negate))
    if isinstance(phi, FImplies):
        if negate:
            return FAnd(nnf_classical(phi.left), nnf_classical(phi.right, True))
        return FOr(nnf_classical(phi.left, True), nnf_classical(phi.right))
    if isinstance(phi, FExists):
        return (FForall if negate else FExists)(phi.var, nnf_classical(phi.body, negate))
    if isinstance(phi, FForall):
        return (FExists if negate else FForall)(phi.var, nnf_classical(phi.body, negate))
    raise TypeError(f"not a classical formula: {phi!r}")


# -- polarity ----------------------------------------------------------------

def occurrences(phi: Node, sym: str) -> list[tuple[Node, bool]]:
    """Occurrences of relation ``sym`` with their polarity (True = positive).

    Anything inside the condition of a selective implication counts as both
    polarities, since the condition selects rows.
    """
    out = []

    def go(n, positive, both):
        if isinstance(n, RelLit):
            if n.sym == sym:
                out.append((n, n.positive and not both))
                if both:
                    out.append((n, False))
        elif isinstance(n, FAtom):
            if n.sym == sym:
                out.append((n, positive and not both))
                if both:
                    out.append((n, False))
        elif isinstance(n, FNot):
            go(n.body, not positive, both)
        elif isinstance(n, FImplies):
            go(n.left, not positive, both)
            go(n.right, positive, both)
        elif isinstance(n, SelImp):
            go(n.cond, positive, True)
            go(n.body, positive, both)
        else:
            for c in n.children():
                go(c, positive, both)

    go(phi, True, False)
    return out


def check_positive(phi: Node, sym: str) -> bool:
    """True iff ``sym`` never occurs negatively (vacuously true if absent)."""
    return all(positive for _, positive in occurrences(phi, sym))


def count_occurrences(phi: Node, sym: str) -> int:
    return sum(1 for n in walk(phi) if isinstance(n, (RelLit, FAtom)) and n.sym == sym)


# -- renaming and substitution -------------------------------------------------

def rename_free(phi: Node, mapping: dict[str, str], fresh: FreshNames | None = None) -> Node:
    """Capture-avoiding renaming of free variables.

    Bound variables that would capture a new name are renamed first.
    """
    if not mapping:
        return phi
    if fresh is None:
        fresh = FreshNames(all_vars(phi) | set(mapping) | set(mapping.values()))
    m = lambda v: mapping.get(v, v)

    if isinstance(phi, RelLit):
        return RelLit(phi.sym, tuple(map(m, phi.args)), phi.positive)
    if isinstance(phi, FAtom):
        return FAtom(phi.sym, tuple(map(m, phi.args)))
    if isinstance(phi, EqLit):
        return EqLit(m(phi.left), m(phi.right), phi.positive)
    if isinstance(phi, FEq):
        return FEq(m(phi.left), m(phi.right))
    if isinstance(phi, DepAtom):
        return DepAtom(phi.name, tuple(tuple(map(m, g)) for g in phi.groups))
    if isinstance(phi, QUANTIFIERS):
        inner = {k: v for k, v in mapping.items() if k != phi.var and k in phi.body.free_vars}
        var = phi.var
        if var in inner.values():
            new = fresh(var)
            inner[var] = new
            var = new
        return type(phi)(var, rename_free(phi.body, inner, fresh))
    if isinstance(phi, SelImp):
        return SelImp(rename_free(phi.cond, mapping, fresh), rename_free(phi.body, mapping, fresh))
    if isinstance(phi, FNot):
        return FNot(rename_free(phi.body, mapping, fresh))
    return type(phi)(rename_free(phi.left, mapping, fresh), rename_free(phi.right, mapping, fresh))


def rename_bound_apart(phi: Node, avoid: Iterable[str], fresh: FreshNames | None = None) -> Node:
    """Rename every bound variable that lies in ``avoid`` (or is bound twice)."""
    avoid = set(avoid)
    if fresh is None:
        fresh = FreshNames(all_vars(phi) | avoid)
    seen = set()

    def go(n):
        if isinstance(n, QUANTIFIERS):
            var = n.var
            body = n.body
            if var in avoid or var in seen:
                new = fresh(var)
                body = rename_free(body, {var: new}, fresh)
                var = new
            seen.add(var)
            return type(n)(var, go(body))
        if isinstance(n, (RelLit, FAtom, EqLit, FEq, DepAtom)):
            return n
        if isinstance(n, SelImp):
            return SelImp(go(n.cond), go(n.body))
        if isinstance(n, FNot):
            return FNot(go(n.body))
        return type(n)(go(n.left), go(n.right))

    return go(phi)


def substitute_relation(phi: Classical, sym: str, theta: Classical,
                        params: Sequence[str]) -> Classical:
    """Replace every ``sym(t)`` in ``phi`` with ``theta(t)``.

    ``params`` are the variables of ``theta`` standing for the arguments;
    its other free variables stay free in the result.  Bound variables of
    ``phi`` that clash with them are renamed first, and ``theta``'s own bound
    variables are renamed away from each argument tuple.
    """
    params = tuple(params)
    if len(set(params)) != len(params):
        raise FormulaError("substitution parameters must be distinct")
    arities = relation_symbols(phi)
    if sym in arities and arities[sym] != len(params):
        raise FormulaError(f"arity mismatch: {sym} has arity {arities[sym]}, "
                           f"replacement has {len(params)} parameters")
    extra = theta.free_vars - set(params)
    fresh = FreshNames(all_vars(phi) | all_vars(theta) | {sym})
    phi = rename_bound_apart(phi, extra, fresh)

    def go(n):
        if isinstance(n, FAtom):
            if n.sym != sym:
                return n
            body = rename_bound_apart(theta, set(n.args) | extra, fresh)
            return rename_free(body, dict(zip(params, n.args)), fresh)
        if isinstance(n, FEq):
            return n
        if isinstance(n, FNot):
            return FNot(go(n.body))
        if isinstance(n, (FExists, FForall)):
            return type(n)(n.var, go(n.body))
        if isinstance(n, (FAnd, FOr, FImplies)):
            return type(n)(go(n.left), go(n.right))
        raise TypeError(f"not a classical formula: {n!r}")

    return go(phi)


def substitute_symbol(phi: Node, old: str, new: str) -> Node:
    """Rename relation symbol ``old`` to ``new`` everywhere."""
    def go(n):
        if isinstance(n, RelLit):
            return RelLit(new, n.args, n.positive) if n.sym == old else n
        if isinstance(n, FAtom):
            return FAtom(new, n.args) if n.sym == old else n
        if isinstance(n, (EqLit, FEq, DepAtom)):
            return n
        if isinstance(n, QUANTIFIERS):
            return type(n)(n.var, go(n.body))
        if isinstance(n, SelImp):
            return SelImp(go(n.cond), go(n.body))
        if isinstance(n, FNot):
            return FNot(go(n.body))
        return type(n)(go(n.left), go(n.right))

    return go(phi)


def map_leaves(phi: Node, fn: Callable[[Node], Node | None]) -> Node:
    """Rebuild ``phi`` replacing each leaf ``n`` with ``fn(n)`` (``None`` keeps it)."""
    if isinstance(phi, (RelLit, FAtom, EqLit, FEq, DepAtom)):
        out = fn(phi)
        return phi if out is None else out
    if isinstance(phi, QUANTIFIERS):
        return type(phi)(phi.var, map_leaves(phi.body, fn))
    if isinstance(phi, SelImp):
        return SelImp(map_leaves(phi.cond, fn), map_leaves(phi.body, fn))
    if isinstance(phi, FNot):
        return FNot(map_leaves(phi.body, fn))
    return type(phi)(map_leaves(phi.left, fn), map_leaves(phi.right, fn))


# -- prenex ------------------------------------------------------------------

def to_prenex(phi: Node) -> Classical:
    """Prenex normal form with a quantifier-free NNF matrix.

    Team formulas are accepted only when first order (no dependency atoms);
    bound variables are renamed apart where needed before quantifiers are
    pulled out, left operand first.
    """
    if isinstance(phi, Formula):
        if dep_atoms(phi):
            raise FormulaError("prenex form is only defined for first order formulas; "
                               "dependency atom present")
        phi = to_classical(phi)
    phi = nnf_classical(phi)
    phi = rename_bound_apart(phi, phi.free_vars)

    def pull(n):
        if isinstance(n, (FExists, FForall)):
            prefix, matrix = pull(n.body)
            return [(type(n), n.var)] + prefix, matrix
        if isinstance(n, (FAnd, FOr)):
            lp, lm = pull(n.left)
            rp, rm = pull(n.right)
            return lp + rp, type(n)(lm, rm)
        return [], n

    prefix, matrix = pull(phi)
    for cls, var in reversed(prefix):
        matrix = cls(var, matrix)
    return matrix


def is_prenex(phi: Node) -> bool:
    n = phi
    while isinstance(n, QUANTIFIERS):
        n = n.body
    return is_quantifier_free(n)


def split_prefix(phi: Node) -> tuple[list[tuple[str, str]], Node]:
    """``[('A'|'E', var), ...]`` and the matrix of a prenex formula."""
    prefix = []
    n = phi
    while isinstance(n, QUANTIFIERS):
        prefix.append(("E" if isinstance(n, (Exists, FExists)) else "A", n.var))
        n = n.body
    return prefix, n
