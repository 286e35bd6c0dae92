"""Goal preprocessing for SMT solvers.

A small proof-goal compiler: it parses a Coq-like core language, applies
composable context transformations (inductive-type axiomatization,
first-orderization, definition expansion, knowledge-base driven type and
logic translation), validates what it generated against a finite-model
oracle, and emits SMT-LIB 2 for an external solver.
"""

from .backend import EmitError, SolverResult, check_goal, emit_smt, solve
from .oracle import (EvalError, FiniteModel, Oracle, default_model,
                     eval_formula, eval_term, parse_model_file, random_model)
from .pipeline import (PipelineContext, PipelineError, PipelineResult,
                       Problem, STRATEGIES, format_trace, list_transformations,
                       load_problem, run_pipeline, run_strategy)
from .syntax import (ParseError, TypecheckError, parse_formula,
                     parse_goal_file, parse_program, parse_term)
from .terms import Goal, GlobalEnv, Hyp, SnipeError, alpha_eq, goal_alpha_eq
from .trakt import KnowledgeDb, TraktError, build_db, translate_goal

__version__ = "0.1.0"

__all__ = [
    "EmitError", "EvalError", "FiniteModel", "Goal", "GlobalEnv", "Hyp",
    "KnowledgeDb", "Oracle", "ParseError", "PipelineContext", "PipelineError",
    "PipelineResult", "Problem", "STRATEGIES", "SnipeError", "SolverResult",
    "TraktError", "TypecheckError", "alpha_eq", "build_db", "check_goal",
    "default_model", "emit_smt", "eval_formula", "eval_term", "format_trace",
    "goal_alpha_eq", "list_transformations", "load_problem", "parse_formula",
    "parse_goal_file", "parse_model_file", "parse_program", "parse_term",
    "random_model", "run_pipeline", "run_strategy", "solve", "translate_goal",
    "__version__",
]
