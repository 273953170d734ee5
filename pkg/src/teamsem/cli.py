"""Command line interface.

Exit codes: 0 true / success, 1 false, 2 input or usage error, 3 harness
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .dependencies import (DependencyError, DependencyRegistry, PROPERTIES, classify,
                           compute_dmax, describe, relativize_closed_world)
from .evaluate import EvalConfig, NAIVE, TeamEvaluator, EvaluationError
from .fileio import FileFormatError, load_model, load_team
from .model import ModelError, Team
from .syntax import FormulaError, parse_classical, parse_team, to_nnf, to_prenex, to_text
from .tarski import tarski_eval
from .transforms import (PASSES, Eq1Case, PutbackGroup, TransformError, assemble_putback,
                         build_dep_union, build_eq1, build_nt_relativized, build_phi_R,
                         build_theta_T, desugar, extract_atoms, put_back_qfree, safety_pipeline,
                         split_occurrences)
from .verify import HARNESSES, SweepSpec, VerifyError, run_harness

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR, EXIT_HARNESS = 0, 1, 2, 3
INPUT_ERRORS = (FileFormatError, FormulaError, DependencyError, EvaluationError, ModelError,
                TransformError, VerifyError)
MARK = {True: "✓", False: "✗"}


class UsageError(Exception):
    pass


def _formula_text(args) -> str:
    if getattr(args, "formula_file", None):
        try:
            return Path(args.formula_file).read_text(encoding="utf-8").strip()
        except OSError as exc:
            raise FileFormatError(exc.strerror or "cannot read file", args.formula_file) from None
    if getattr(args, "formula", None) is None:
        raise UsageError("a formula is required (--formula or --formula-file)")
    return args.formula


def _registry(args) -> DependencyRegistry:
    registry = DependencyRegistry()
    paths = []
    env = os.environ.get("TEAMSEM_DEPS")
    if env:
        paths.append(env)
    paths.extend(getattr(args, "deps", None) or [])
    for p in paths:
        try:
            text = Path(p).read_text(encoding="utf-8")
        except OSError as exc:
            raise FileFormatError(exc.strerror or "cannot read file", p) from None
        registry.load(text, p)
    return registry


def _config(args) -> EvalConfig:
    return NAIVE if getattr(args, "strategy", "fast") == "naive" else EvalConfig()


# -- subcommands -------------------------------------------------------------

def cmd_parse(args, out):
    text = _formula_text(args)
    if args.classical:
        phi = parse_classical(text)
    else:
        phi = parse_team(text, _registry(args))
    print(to_text(phi), file=out)
    return EXIT_TRUE


def cmd_eval(args, out):
    registry = _registry(args)
    model = load_model(args.model)
    team = load_team(args.team, model) if args.team else Team.unit()
    phi = parse_team(_formula_text(args), registry)
    ev = TeamEvaluator(model, registry, _config(args))
    verdict = ev.holds(phi, team)
    print("true" if verdict else "false", file=out)
    if args.trace:
        print(ev.explain(phi, team).render(model), file=out)
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_tarski(args, out):
    model = load_model(args.model)
    phi = parse_classical(_formula_text(args))
    assignment = {}
    for item in args.assign or []:
        var, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"assignment {item!r} must look like VAR=ELEMENT")
        assignment[var.strip()] = model.element(value.strip())
    verdict = tarski_eval(model, assignment, phi)
    print("true" if verdict else "false", file=out)
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_classify(args, out):
    dep = _registry(args).parse_spec(args.dep)
    verdicts = classify(dep, args.max_domain)
    print(f"dependency {dep.label}", file=out)
    for prop in PROPERTIES + ("closed-world",):
        v = verdicts[prop]
        detail = f"verified up to |M| = {v.bound}" if v.holds else v.describe().split(": ", 1)[1]
        print(f"  {prop:<13} {MARK[v.holds]}  {detail}", file=out)
    return EXIT_TRUE


def cmd_dmax(args, out):
    dep = _registry(args).parse_spec(args.dep)
    maximal = sorted(compute_dmax(dep, range(args.max_domain)), key=lambda r: r.sorted())
    print(f"maximal members of {dep.label} over {{0..{args.max_domain - 1}}}: {len(maximal)}",
          file=out)
    for rel in maximal:
        print("  {" + ", ".join("(" + " ".join(map(str, t)) + ")" for t in rel.sorted()) + "}",
              file=out)
    return EXIT_TRUE


def _vars(text: str | None, default: str) -> tuple[str, ...]:
    return tuple(v for v in (text or default).replace(",", " ").split() if v)


def cmd_transform(args, out):
    registry = _registry(args)
    name = args.pass_name
    if name in ("desugar", "extract", "pipeline"):
        phi = parse_team(_formula_text(args), registry)
        targets = set(_vars(args.targets, "const"))
        if name == "desugar":
            result = desugar(phi)
        elif name == "extract":
            ext = extract_atoms(phi, targets, registry)
            result = ext.formula
            for sym, dep, k in ext.bindings:
                print(f"# {sym}/{k} satisfies {dep.label}", file=out)
        else:
            result = safety_pipeline(phi, targets, registry)
    elif name in ("split", "prenex", "nnf", "putback"):
        chi = parse_classical(_formula_text(args))
        if name == "split":
            result, names = split_occurrences(chi, args.symbol or "S")
            print(f"# new symbols: {' '.join(names) or '(none)'}", file=out)
        elif name == "prenex":
            result = to_prenex(chi)
        elif name == "nnf":
            result = to_nnf(chi)
        else:
            dep = registry.parse_spec(args.dep or "const/1")
            result = assemble_putback(chi, [PutbackGroup(dep, _vars(args.symbol, "W"))])
    elif name == "putback-qfree":
        psi = parse_team(_formula_text(args), registry)
        result, v, w = put_back_qfree(psi, args.symbol or "W", args.arity)
        print(f"# v = {' '.join(v)}   w = {' '.join(w)}", file=out)
    elif name == "dep-union":
        dep = registry.parse_spec(args.dep or "const/1")
        k = dep.arity
        vs = [tuple(f"v{i}_{j}" if k > 1 else f"v{i}" for j in range(1, k + 1)) for i in range(1, args.n + 1)]
        ws = [tuple(f"w{i}_{j}" if k > 1 else f"w{i}" for j in range(1, k + 1)) for i in range(1, args.n + 1)]
        result = build_dep_union(dep, vs, ws)
    elif name == "phi-r":
        result = build_phi_R(registry.parse_spec(args.dep or "const/1"))
    elif name == "theta-t":
        result = build_theta_T(registry.parse_spec(args.dep or "const/1"))
    elif name == "eq1":
        dep = registry.parse_spec(args.dep or "const/1")
        cases = []
        for spec in args.case or []:
            parts = [p.strip() for p in spec.split("|")]
            if len(parts) not in (2, 3):
                raise UsageError("--case takes 'THETA | PARAMS [| EXTRA]'")
            cases.append(Eq1Case(parse_classical(parts[0]), _vars(parts[1], ""),
                                 _vars(parts[2], "") if len(parts) == 3 else ()))
        result = build_eq1(dep, cases, _vars(args.vars, "v"))
    elif name == "nt-relativized":
        result = build_nt_relativized(args.var or "t", args.pred or "P")
    elif name == "relativize":
        dep = registry.parse_spec(args.dep or "const/1")
        result = relativize_closed_world(dep, args.pred or "P",
                                         _vars(args.vars, " ".join(f"x{i}" for i in range(1, dep.arity + 1))),
                                         args.max_domain)
    else:
        raise UsageError(f"unknown pass {name!r}")
    print(to_text(result), file=out)
    return EXIT_TRUE


def cmd_verify(args, out):
    spec = SweepSpec(max_domain=args.max_domain, max_rows=args.max_rows, seed=args.seed,
                     jobs=args.jobs, budget=args.budget)
    report = run_harness(args.harness, spec)
    print(report.to_text(), end="", file=out)
    path = args.report
    if path is None and not report.ok:
        path = f"{args.harness}-report.txt"
    if path:
        Path(path).write_text(report.to_lines(), encoding="utf-8")
        print(f"report written to {path}", file=out)
    return EXIT_TRUE if report.ok else EXIT_HARNESS


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teamsem", description="Team semantics engine for "
                                     "first order logic with dependency atoms over finite models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formula=True):
        p.add_argument("--deps", action="append", metavar="FILE",
                       help="dependency definition file (repeatable; TEAMSEM_DEPS is also read)")
        if formula:
            p.add_argument("--formula", "-f", help="formula text")
            p.add_argument("--formula-file", metavar="FILE", help="read the formula from a file")

    p = sub.add_parser("parse", help="parse and print a formula in canonical form")
    common(p)
    p.add_argument("--classical", action="store_true", help="parse as a classical formula")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="evaluate a team formula on a model and team")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--team", help="team file (default: the team holding the empty assignment)")
    p.add_argument("--strategy", choices=("naive", "fast"), default="fast")
    p.add_argument("--trace", action="store_true", help="print the witness tree")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tarski", help="evaluate a classical formula under an assignment")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--assign", action="append", metavar="VAR=ELEMENT")
    p.set_defaults(func=cmd_tarski)

    p = sub.add_parser("classify", help="closure properties of a dependency")
    common(p, formula=False)
    p.add_argument("--dep", required=True, help="e.g. const/1, dep(1;1), incl(1), nt, cex4")
    p.add_argument("--max-domain", type=int, default=3)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("dmax", help="maximal relations of a dependency over {0..n-1}")
    common(p, formula=False)
    p.add_argument("--dep", required=True)
    p.add_argument("--max-domain", type=int, default=3, help="domain size")
    p.set_defaults(func=cmd_dmax)

    p = sub.add_parser("transform", help="apply a formula transformation")
    common(p)
    p.add_argument("pass_name", metavar="pass", choices=PASSES, help=", ".join(PASSES))
    p.add_argument("--dep")
    p.add_argument("--targets", help="dependency names to extract (default const)")
    p.add_argument("--symbol", help="relation symbol(s) acted on")
    p.add_argument("--arity", type=int, default=1)
    p.add_argument("--n", type=int, default=1, help="number of encoded relations")
    p.add_argument("--case", action="append", help="'THETA | PARAMS [| EXTRA]' for eq1")
    p.add_argument("--vars")
    p.add_argument("--var")
    p.add_argument("--pred")
    p.add_argument("--max-domain", type=int, default=3)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="run a verification harness")
    p.add_argument("harness", choices=sorted(HARNESSES))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-domain", type=int, default=2)
    p.add_argument("--max-rows", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--budget", type=int)
    p.add_argument("--report", metavar="FILE", help="write the machine readable report here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_TRUE
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"teamsem: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except INPUT_ERRORS as exc:
        print(f"teamsem: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
