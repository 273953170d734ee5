"""Exact team semantics for first order logic with dependency atoms over finite models."""

from .dependencies import (Dependency, DependencyError, DependencyRegistry, Verdict, builtin,
                           classify, compute_dmax, fo_dependency)
from .evaluate import EvalConfig, NAIVE, TeamEvaluator, sentence_true, team_eval
from .fileio import FileFormatError, load_model, load_team, parse_model, parse_team_file
from .model import (ModelError, Relation, Structure, Team, duplicate, project_team, restrict_team,
                    select_team, supplement)
from .syntax import FormulaError, parse_classical, parse_team, to_text
from .tarski import EvaluationError, tarski_eval
from .transforms import TransformError, safety_pipeline
from .verify import Report, SweepSpec, run_harness

__all__ = [
    "Dependency", "DependencyError", "DependencyRegistry", "Verdict", "builtin", "classify",
    "compute_dmax", "fo_dependency", "EvalConfig", "NAIVE", "TeamEvaluator", "sentence_true",
    "team_eval", "FileFormatError", "load_model", "load_team", "parse_model", "parse_team_file",
    "ModelError", "Relation", "Structure", "Team", "duplicate", "project_team", "restrict_team",
    "select_team", "supplement", "FormulaError", "parse_classical", "parse_team", "to_text",
    "EvaluationError", "tarski_eval", "TransformError", "safety_pipeline", "Report", "SweepSpec",
    "run_harness",
]
