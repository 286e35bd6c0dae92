"""Composable preprocessing pipelines over goals.

Each transformation takes a goal and returns a new goal, leaving the
environment untouched; pipelines chain them and record a trace step per
transformation with the hypothesis-level diff, so the provenance of every
generated statement stays inspectable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import terms as T
from .defs import expand_constants, replace_anon_fix
from .fol import eliminate_ho_equalities, monomorphize
from .indu import (adt_axioms, eliminate_pattern_matching,
                   get_gen_statements_for_variables_in_context,
                   inv_principle_all)
from .oracle import FiniteModel
from .syntax import parse_program
from .terms import INT, Goal, GlobalEnv
from .trakt import (ClaimStatus, KnowledgeDb, TraktError, bool_counterparts,
                    build_db, translate_goal, validate_db)


class PipelineError(T.SnipeError):
    pass


# ---------------------------------------------------------------------------
# Context and registry


@dataclass
class PipelineContext:
    """Tunable knobs shared by all transformations in a run."""

    env: GlobalEnv
    db: "KnowledgeDb | None" = None
    opaque: tuple[str, ...] = ()
    expand_depth: int = 3
    mono_cap: int = 64
    adt_kinds: str = "DI"
    embed_target: T.Ty = INT
    target_logic: str = "Prop"


@dataclass(frozen=True)
class Transformation:
    name: str
    fn: Callable
    description: str


REGISTRY: dict[str, Transformation] = {}


def register(name: str, description: str):
    def deco(fn):
        REGISTRY[name] = Transformation(name, fn, description)
        return fn
    return deco


def list_transformations() -> list[Transformation]:
    return list(REGISTRY.values())


# ---------------------------------------------------------------------------
# Registered transformations.  Each returns (goal, note).


@register("expand", "add definitional equations for defined constants")
def _t_expand(ctx: PipelineContext, goal: Goal):
    cp = bool_counterparts(ctx.env, ctx.db) if ctx.db is not None else None
    return expand_constants(ctx.env, goal, opaque=ctx.opaque,
                            depth=ctx.expand_depth, counterparts=cp), ""


@register("named-fix", "replace anonymous fixpoints by recursive equations")
def _t_named_fix(ctx: PipelineContext, goal: Goal):
    return replace_anon_fix(ctx.env, goal), ""


@register("ho-elim", "turn equalities between functions into pointwise ones")
def _t_ho_elim(ctx: PipelineContext, goal: Goal):
    return eliminate_ho_equalities(ctx.env, goal), ""


@register("pattern-elim", "compile pattern matching to conditional equations")
def _t_pattern_elim(ctx: PipelineContext, goal: Goal):
    return eliminate_pattern_matching(ctx.env, goal), ""


@register("inversion", "add inversion principles for inductive relations")
def _t_inversion(ctx: PipelineContext, goal: Goal):
    return inv_principle_all(ctx.env, goal), ""


@register("adt-axioms", "add injectivity/disjointness axioms for data types")
def _t_adt_axioms(ctx: PipelineContext, goal: Goal):
    return adt_axioms(ctx.env, goal, kinds=ctx.adt_kinds), ""


@register("generation", "case-split context variables of inductive types")
def _t_generation(ctx: PipelineContext, goal: Goal):
    return get_gen_statements_for_variables_in_context(ctx.env, goal), ""


@register("monomorphize", "instantiate polymorphic hypotheses at ground types")
def _t_monomorphize(ctx: PipelineContext, goal: Goal):
    notes: list[str] = []
    out = monomorphize(ctx.env, goal, cap=ctx.mono_cap, notes=notes)
    return out, "; ".join(notes)


def _t_trakt(ctx: PipelineContext, goal: Goal, logic: str):
    db = ctx.db if ctx.db is not None else KnowledgeDb()
    out, rep = translate_goal(ctx.env, db, goal, ctx.embed_target, logic)
    if rep.residue is not None:
        raise TraktError(f"translation blocked: {rep.residue}")
    note = "fired: " + ", ".join(rep.fired) if rep.fired else ""
    return out, note


@register("trakt", "translate along the knowledge base (configured logic)")
def _t_trakt_default(ctx: PipelineContext, goal: Goal):
    return _t_trakt(ctx, goal, ctx.target_logic)


@register("trakt-prop", "translate along the knowledge base into Prop")
def _t_trakt_prop(ctx: PipelineContext, goal: Goal):
    return _t_trakt(ctx, goal, "Prop")


@register("trakt-bool", "translate along the knowledge base into bool")
def _t_trakt_bool(ctx: PipelineContext, goal: Goal):
    return _t_trakt(ctx, goal, "Bool")


# ---------------------------------------------------------------------------
# Running pipelines


@dataclass(frozen=True)
class TraceStep:
    name: str
    changed: bool
    added: tuple[str, ...]
    removed: tuple[str, ...]
    rewritten: tuple[str, ...]
    note: str = ""


@dataclass
class PipelineResult:
    goal: Goal
    steps: list[TraceStep]

    @property
    def changed(self) -> bool:
        return any(s.changed for s in self.steps)


def _diff(before: Goal, after: Goal):
    old = {h.name: h for h in before.hyps}
    new = {h.name: h for h in after.hyps}
    added = tuple(n for n in new if n not in old)
    removed = tuple(n for n in old if n not in new)
    rewritten = tuple(n for n in new if n in old and new[n] != old[n])
    return added, removed, rewritten


def run_pipeline(ctx: PipelineContext, goal: Goal, steps,
                 strict: bool = False) -> PipelineResult:
    """Apply the named transformations in order.

    In lenient mode (the default) a failing transformation is recorded in
    the trace and skipped; in strict mode it aborts the run.
    """
    trace: list[TraceStep] = []
    cur = goal
    for name in steps:
        tr = REGISTRY.get(name)
        if tr is None:
            raise PipelineError(f"unknown transformation {name!r}")
        before = cur
        try:
            cur, note = tr.fn(ctx, cur)
        except T.SnipeError as exc:
            if strict:
                raise PipelineError(f"{name}: {exc}") from exc
            trace.append(TraceStep(name, False, (), (), (),
                                   f"skipped: {exc}"))
            cur = before
            continue
        added, removed, rewritten = _diff(before, cur)
        trace.append(TraceStep(name, cur != before, added, removed,
                               rewritten, note))
    return PipelineResult(cur, trace)


@dataclass(frozen=True)
class Strategy:
    name: str
    steps: tuple[str, ...]
    description: str


STRATEGIES: dict[str, Strategy] = {
    "scope": Strategy(
        "scope",
        ("trakt-prop", "expand", "named-fix", "ho-elim", "pattern-elim",
         "adt-axioms", "generation", "monomorphize", "trakt-bool"),
        "full preprocessing for solver hand-off"),
    "fol": Strategy(
        "fol",
        ("expand", "named-fix", "ho-elim", "pattern-elim", "monomorphize"),
        "first-orderization only"),
    "indu": Strategy(
        "indu",
        ("inversion", "adt-axioms", "generation"),
        "inductive-type axiomatization only"),
    "trakt": Strategy(
        "trakt",
        ("trakt",),
        "knowledge-base translation only"),
    "none": Strategy("none", (), "no preprocessing"),
}


def run_strategy(ctx: PipelineContext, goal: Goal, strategy: str,
                 strict: bool = False) -> PipelineResult:
    st = STRATEGIES.get(strategy)
    if st is None:
        raise PipelineError(f"unknown strategy {strategy!r}")
    return run_pipeline(ctx, goal, st.steps, strict=strict)


def format_trace(result: PipelineResult) -> str:
    lines = []
    for i, s in enumerate(result.steps, start=1):
        parts = [f"[{i}] {s.name:<14}"]
        if s.added:
            parts.append("+" + ",".join(s.added))
        if s.removed:
            parts.append("-" + ",".join(s.removed))
        if s.rewritten:
            parts.append("~" + ",".join(s.rewritten))
        if not s.changed and not s.note:
            parts.append("(no change)")
        if s.note:
            parts.append(s.note)
        lines.append(" ".join(parts))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Loading problems from source text


@dataclass
class Problem:
    env: GlobalEnv
    db: KnowledgeDb
    goal: "Goal | None"
    claim_statuses: list[ClaimStatus] = field(default_factory=list)

    def failed_claims(self) -> list[ClaimStatus]:
        return [s for s in self.claim_statuses if not s.ok]


def load_problem(sources, model: "FiniteModel | None" = None,
                 validate: bool = True) -> Problem:
    """Parse declaration/goal sources (in order, sharing one environment),
    build the knowledge base from the collected commands, and optionally
    validate all registered claims against a finite model."""
    prog = None
    for text in sources:
        prog = parse_program(text, prog)
    if prog is None:
        prog = parse_program("")
    db = build_db(prog.env, prog.trakt_commands)
    statuses = validate_db(prog.env, db, model) if validate else []
    return Problem(prog.env, db, prog.goal, statuses)
