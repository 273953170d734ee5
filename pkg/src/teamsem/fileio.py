"""Reading and writing model and team files.

Model files::

    domain a b c
    rel R 2
      a b
      b c
    end
    pred P: a b

Team files::

    team x y
      a b
    end

A ``team`` line without variables followed by ``eps`` is the team holding
the empty assignment; no row lines at all is the empty team.  ``#`` starts
a comment.
"""

from __future__ import annotations

from pathlib import Path

from .model import ModelError, Structure, Team


class FileFormatError(ValueError):
    def __init__(self, message: str, source: str = "<input>", line: int | None = None):
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line = line


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def parse_model(text: str, source: str = "<model>") -> Structure:
    domain = None
    relations: dict = {}
    predicates: dict = {}
    open_rel = None

    def element(name, no):
        if domain is None:
            raise FileFormatError("'domain' must come first", source, no)
        if name not in domain:
            raise FileFormatError(f"unknown element {name!r}", source, no)
        return domain.index(name)

    for no, words in _lines(text):
        head = words[0]
        if domain is None and head != "domain":
            raise FileFormatError("'domain' must come first", source, no)
        if open_rel is not None:
            if head == "end" and len(words) == 1:
                open_rel = None
                continue
            sym, arity = open_rel
            if len(words) != arity:
                raise FileFormatError(f"tuple for {sym} needs {arity} elements", source, no)
            relations[sym][1].add(tuple(element(w, no) for w in words))
            continue
        if head == "domain":
            if domain is not None:
                raise FileFormatError("duplicate 'domain' line", source, no)
            domain = words[1:]
            if not domain:
                raise FileFormatError("domain must be nonempty", source, no)
            if len(set(domain)) != len(domain):
                raise FileFormatError("duplicate element names", source, no)
        elif head == "rel":
            if len(words) != 3 or not words[2].isdigit():
                raise FileFormatError("expected 'rel NAME ARITY'", source, no)
            sym, arity = words[1], int(words[2])
            if sym in relations or sym in predicates:
                raise FileFormatError(f"symbol {sym} declared twice", source, no)
            relations[sym] = (arity, set())
            open_rel = (sym, arity)
        elif head == "pred":
            rest = " ".join(words[1:])
            if ":" not in rest:
                raise FileFormatError("expected 'pred NAME: elements'", source, no)
            sym, members = rest.split(":", 1)
            sym = sym.strip()
            if not sym or sym in relations or sym in predicates:
                raise FileFormatError(f"bad or duplicate predicate name {sym!r}", source, no)
            predicates[sym] = {element(w, no) for w in members.split()}
        else:
            raise FileFormatError(f"unexpected {head!r}", source, no)
    if open_rel is not None:
        raise FileFormatError(f"relation {open_rel[0]} not closed with 'end'", source)
    if domain is None:
        raise FileFormatError("missing 'domain' line", source)
    try:
        return Structure(tuple(domain), {s: (k, frozenset(t)) for s, (k, t) in relations.items()},
                         {s: frozenset(p) for s, p in predicates.items()})
    except ModelError as exc:
        raise FileFormatError(str(exc), source) from None


def parse_team_file(text: str, structure: Structure, source: str = "<team>") -> Team:
    header = None
    rows = []
    eps = False
    closed = False
    for no, words in _lines(text):
        if header is None:
            if words[0] != "team":
                raise FileFormatError("expected 'team VARS'", source, no)
            header = words[1:]
            if len(set(header)) != len(header):
                raise FileFormatError("duplicate team variables", source, no)
            continue
        if closed:
            raise FileFormatError("content after 'end'", source, no)
        if words == ["end"]:
            closed = True
            continue
        if not header:
            if words != ["eps"]:
                raise FileFormatError("a team without variables only allows the row 'eps'", source, no)
            eps = True
            continue
        if len(words) != len(header):
            raise FileFormatError(f"row needs {len(header)} values", source, no)
        for w in words:
            if w not in structure.domain:
                raise FileFormatError(f"unknown element {w!r}", source, no)
        rows.append(tuple(structure.element(w) for w in words))
    if header is None:
        raise FileFormatError("missing 'team' line", source)
    if not header:
        return Team.unit() if eps else Team.empty()
    return Team(header, rows)


def format_model(structure: Structure) -> str:
    out = ["domain " + " ".join(structure.domain)]
    for sym in sorted(structure.relations):
        arity, tuples = structure.relations[sym]
        out.append(f"rel {sym} {arity}")
        out.extend("  " + " ".join(structure.name(e) for e in t) for t in sorted(tuples))
        out.append("end")
    for sym in sorted(structure.predicates):
        members = sorted(structure.predicates[sym])
        out.append(f"pred {sym}: " + " ".join(structure.name(e) for e in members))
    return "\n".join(out) + "\n"


def format_team(team: Team, structure: Structure) -> str:
    out = ["team " + " ".join(team.vardom) if team.vardom else "team"]
    if not team.vardom:
        if team.rows:
            out.append("  eps")
    else:
        out.extend("  " + " ".join(structure.name(e) for e in r) for r in team.rows)
    out.append("end")
    return "\n".join(out) + "\n"


def load_model(path) -> Structure:
    path = Path(path)
    return parse_model(_read(path), str(path))


def load_team(path, structure: Structure) -> Team:
    path = Path(path)
    return parse_team_file(_read(path), structure, str(path))


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(exc.strerror or "cannot read file", str(path)) from None
