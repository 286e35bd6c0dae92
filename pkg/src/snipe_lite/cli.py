"""Command-line driver.

Loads the prelude, declaration files, and one or more goal files, runs a
preprocessing strategy, and prints the transformed goal together with a
justification trace.  Subcommands:

  preprocess   run a strategy and print the resulting goal and trace
  solve        preprocess, emit SMT-LIB 2, and hand the script to a solver
  axioms       dump the statements the inductive-type transformations generate
  check        validate knowledge-base claims (and the goal) against a model

Exit status: 0 on success (solver said unsat), 1 when the solver answered
sat/unknown or a check found a falsified statement, 2 on usage or input
errors.  Output depends only on the inputs and flags, so identical
invocations produce byte-identical output.
"""

import argparse
import concurrent.futures
import sys
from importlib import resources

from . import terms as T
from .backend import EmitError, emit_smt, solve
from .indu import adt_axiom_statements, gen_statement, inv_principle
from .oracle import (EvalError, FiniteModel, Oracle, default_model,
                     parse_model_file)
from .pipeline import (PipelineContext, PipelineError, load_problem,
                       run_strategy, format_trace, STRATEGIES)
from .printer import print_formula, print_goal
from .terms import forall_chain, free_vars

PRELUDE_FILES = ("nat.v", "list.v", "poly.v", "int.v")


class UsageError(Exception):
    """Bad flag combination or unreadable input; exits with status 2."""


def prelude_sources() -> list[str]:
    root = resources.files(__package__).joinpath("prelude")
    return [root.joinpath(name).read_text() for name in PRELUDE_FILES]


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _parse_opaque(values) -> tuple:
    names = []
    for v in values or ():
        names.extend(n for n in v.split(",") if n)
    return tuple(names)


def _load_model(path: "str | None") -> FiniteModel:
    if path is None:
        return default_model()
    try:
        return parse_model_file(_read(path))
    except EvalError as exc:
        raise UsageError(str(exc)) from None


def _target_logic(s: str) -> str:
    low = s.lower()
    if low not in ("prop", "bool"):
        raise UsageError(f"--target-logic must be prop or bool, got {s!r}")
    return low.capitalize()


def _embed_target(s: str):
    if s != "Z":
        raise UsageError(f"--embed-target supports only Z, got {s!r}")
    return T.INT


# ---------------------------------------------------------------------------
# Per-goal work


def _build(args, goal_text: str):
    """Parse prelude + decls + one goal file into a Problem."""
    sources = [] if args.no_prelude else prelude_sources()
    sources.extend(_read(p) for p in args.decls or ())
    sources.append(goal_text)
    model = _load_model(args.model)
    validate = getattr(args, "check_oracle", False) or args.cmd == "check"
    try:
        prob = load_problem(sources, model=model, validate=validate)
    except T.SnipeError as exc:
        raise UsageError(str(exc)) from None
    return prob, model


def _context(args, prob) -> PipelineContext:
    return PipelineContext(
        env=prob.env,
        db=prob.db,
        opaque=_parse_opaque(args.opaque),
        expand_depth=args.expand_depth,
        mono_cap=args.mono_cap,
        embed_target=_embed_target(args.embed_target),
        target_logic=_target_logic(args.target_logic),
    )


def _oracle_sweep(prob, result, model) -> tuple[list[str], int]:
    """Check knowledge-base claims and every statement a transformation
    added to the goal.  Statements are closed over the goal's variable
    hypotheses before evaluation.  Returns (report lines, exit code)."""
    lines: list[str] = []
    code = 0
    for st in prob.claim_statuses:
        mark = "ok" if st.ok else "FALSIFIED"
        lines.append(f"claim {st.name}: {mark}" +
                     (f" ({st.detail})" if st.detail and not st.ok else ""))
        if not st.ok:
            code = 1
    added_by: dict[str, str] = {}
    for step in result.steps:
        for name in step.added:
            added_by.setdefault(name, step.name)
    var_hyps = [(h.name, h.body) for h in result.goal.hyps if h.is_var]
    oracle = Oracle(prob.env, model)
    for h in result.goal.hyps:
        step = added_by.get(h.name)
        if step is None or h.is_var or step.startswith("trakt"):
            # trakt adds assumptions (quantifier guards), not theorems
            continue
        fv = free_vars(h.body)
        closed = forall_chain([(n, ty) for n, ty in var_hyps if n in fv],
                              h.body)
        try:
            ok = oracle.eval_formula(closed)
        except T.SnipeError as exc:
            lines.append(f"statement {h.name} [{step}]: not evaluable "
                         f"({exc})")
            continue
        lines.append(f"statement {h.name} [{step}]: "
                     + ("ok" if ok else "FALSIFIED"))
        if not ok:
            code = 1
    return lines, code


def _preprocess_one(args, path: str) -> tuple[str, int]:
    prob, model = _build(args, _read(path))
    if prob.goal is None:
        raise UsageError(f"{path}: no Goal sentence")
    ctx = _context(args, prob)
    try:
        result = run_strategy(ctx, prob.goal, args.pipeline,
                              strict=args.strict)
    except PipelineError as exc:
        if str(exc).startswith("unknown"):
            raise UsageError(str(exc)) from None
        return f"pipeline failed: {exc}\n", 1
    out = [print_goal(result.goal, prob.env)]
    trace = format_trace(result)
    if trace:
        out.append("")
        out.append("trace:")
        out.append(trace)
    code = 0
    if args.check_oracle:
        lines, code = _oracle_sweep(prob, result, model)
        if lines:
            out.append("")
            out.append("oracle:")
            out.extend(lines)
    if args.emit_smt:
        try:
            smt = emit_smt(prob.env, result.goal, logic=args.logic)
        except EmitError as exc:
            return "\n".join(out) + f"\nemit failed: {exc}\n", 1
        with open(args.emit_smt, "w", encoding="utf-8") as fh:
            fh.write(smt)
        out.append("")
        out.append(f"wrote {args.emit_smt}")
    return "\n".join(out) + "\n", code


_VERDICT_CODE = {"unsat": 0, "sat": 1, "unknown": 1, "timeout": 1,
                 "solver-error": 1, "spawn-failure": 1}


def _solve_one(args, path: str) -> tuple[str, int]:
    prob, model = _build(args, _read(path))
    if prob.goal is None:
        raise UsageError(f"{path}: no Goal sentence")
    ctx = _context(args, prob)
    try:
        result = run_strategy(ctx, prob.goal, args.pipeline,
                              strict=args.strict)
    except PipelineError as exc:
        if str(exc).startswith("unknown"):
            raise UsageError(str(exc)) from None
        return f"pipeline failed: {exc}\n", 1
    out: list[str] = []
    code = 0
    if args.check_oracle:
        lines, code = _oracle_sweep(prob, result, model)
        out.extend(lines)
    try:
        smt = emit_smt(prob.env, result.goal, logic=args.logic)
    except EmitError as exc:
        out.append(f"emit failed: {exc}")
        return "\n".join(out) + "\n", 1
    if args.emit_smt:
        with open(args.emit_smt, "w", encoding="utf-8") as fh:
            fh.write(smt)
    verdict = solve(smt, args.solver, timeout=args.timeout)
    line = verdict.kind
    if verdict.detail:
        line += f": {verdict.detail}"
    out.append(line)
    return "\n".join(out) + "\n", max(code, _VERDICT_CODE[verdict.kind])


def _axioms_one(args, goal_text: "str | None") -> tuple[str, int]:
    prob, _ = _build(args, goal_text or "")
    env = prob.env
    if prob.goal is not None:
        from .checker import occurring_relations
        from .indu import _goal_inductives
        names = _goal_inductives(env, prob.goal)
        rels: dict[str, None] = {}
        for h in prob.goal.hyps:
            if not h.is_var:
                for r in occurring_relations(env, h.body):
                    rels.setdefault(r)
        for r in occurring_relations(env, prob.goal.concl):
            rels.setdefault(r)
        names = list(names) + [r for r in rels if r not in names]
    else:
        names = list(env.inductives)
    out: list[str] = []
    for ind in names:
        decl = env.inductives[ind]
        stmts: list[tuple[str, T.Formula]] = []
        if decl.is_prop:
            stmts.append((f"inv_{ind}", inv_principle(env, ind)))
        else:
            stmts.extend(adt_axiom_statements(env, ind, args.adt_kinds))
            stmts.append((f"gen_{ind}", gen_statement(env, ind)))
        for name, f in stmts:
            out.append(f"Lemma {name} : {print_formula(f, env)}.")
    return "\n".join(out) + "\n" if out else "", 0


def _check_one(args, path: "str | None") -> tuple[str, int]:
    prob, model = _build(args, _read(path) if path else "")
    out: list[str] = []
    code = 0
    for st in prob.claim_statuses:
        mark = "ok" if st.ok else "FALSIFIED"
        out.append(f"claim {st.name}: {mark}" +
                   (f" ({st.detail})" if st.detail and not st.ok else ""))
        if not st.ok:
            code = 1
    if prob.goal is not None:
        g = prob.goal
        closure = forall_chain(
            [(h.name, h.body) for h in g.hyps if h.is_var],
            T.impl_chain([h.body for h in g.hyps if not h.is_var], g.concl))
        try:
            ok = Oracle(prob.env, model).eval_formula(closure)
            out.append("goal: " + ("true" if ok else "FALSIFIED"))
            if not ok:
                code = 1
        except T.SnipeError as exc:
            out.append(f"goal: not evaluable ({exc})")
    if not out:
        out.append("nothing to check")
    return "\n".join(out) + "\n", code


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common(p: argparse.ArgumentParser, need_goal: bool) -> None:
    p.add_argument("--goal", action="append", default=[], metavar="FILE",
                   required=need_goal, help="goal file (repeatable)")
    p.add_argument("--decls", action="append", default=[], metavar="FILE",
                   help="declaration file loaded before the goal (repeatable)")
    p.add_argument("--no-prelude", action="store_true",
                   help="do not load the built-in nat/list/poly/int prelude")
    p.add_argument("--model", metavar="FILE",
                   help="finite-model description used by oracle checks")
    p.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="process up to N goal files concurrently")


def _add_pipeline(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pipeline", default="scope",
                   choices=sorted(STRATEGIES),
                   help="preprocessing strategy (default: scope)")
    p.add_argument("--target-logic", default="prop", metavar="prop|bool",
                   help="logic the trakt step translates into")
    p.add_argument("--embed-target", default="Z", metavar="TY",
                   help="embedding target type (only Z is supported)")
    p.add_argument("--opaque", action="append", default=[], metavar="NAMES",
                   help="comma-separated constants the expander must not touch")
    p.add_argument("--expand-depth", type=int, default=3, metavar="N",
                   help="definition-expansion iteration bound")
    p.add_argument("--mono-cap", type=int, default=64, metavar="N",
                   help="monomorphization instance cap")
    p.add_argument("--strict", action="store_true",
                   help="abort on the first failing transformation")
    p.add_argument("--check-oracle", action="store_true",
                   help="validate generated statements against the model")
    p.add_argument("--emit-smt", metavar="FILE",
                   help="also write the SMT-LIB 2 script to FILE")
    p.add_argument("--logic", default="ALL", metavar="NAME",
                   help="value for (set-logic ...) (default: ALL)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="snipe-lite",
        description="Goal preprocessing for SMT solvers: inductive-type "
                    "axiomatization, first-orderization, and knowledge-base "
                    "driven type/logic translation.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("preprocess",
                       help="run a strategy and print the transformed goal")
    _add_common(p, need_goal=True)
    _add_pipeline(p)

    p = sub.add_parser("solve",
                       help="preprocess and hand the goal to an SMT solver")
    _add_common(p, need_goal=True)
    _add_pipeline(p)
    p.add_argument("--solver", required=True, metavar="CMD",
                   help="solver command line; reads SMT-LIB 2 on stdin")
    p.add_argument("--timeout", type=float, default=10.0, metavar="SEC",
                   help="solver wall-clock budget per goal (default: 10)")

    p = sub.add_parser("axioms",
                       help="print the statements generated for inductives")
    _add_common(p, need_goal=False)
    p.add_argument("--adt-kinds", default="DIG", metavar="KINDS",
                   help="subset of D/I/G axioms to include (default: DIG)")

    p = sub.add_parser("check",
                       help="validate knowledge-base claims and the goal")
    _add_common(p, need_goal=False)
    return ap


def _run_many(args, worker, paths) -> int:
    """Run `worker(args, path)` for each goal file, printing results in
    input order (with headers when there are several)."""
    if args.jobs > 1 and len(paths) > 1:
        with concurrent.futures.ThreadPoolExecutor(args.jobs) as pool:
            results = list(pool.map(lambda p: worker(args, p), paths))
    else:
        results = [worker(args, p) for p in paths]
    code = 0
    for path, (text, c) in zip(paths, results):
        if len(paths) > 1:
            sys.stdout.write(f"== {path} ==\n")
        sys.stdout.write(text)
        code = max(code, c)
    return code


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "preprocess":
            if args.emit_smt and len(args.goal) > 1:
                raise UsageError("--emit-smt needs a single goal file")
            return _run_many(args, _preprocess_one, args.goal)
        if args.cmd == "solve":
            if args.emit_smt and len(args.goal) > 1:
                raise UsageError("--emit-smt needs a single goal file")
            return _run_many(args, _solve_one, args.goal)
        if args.cmd == "axioms":
            if len(args.goal) > 1:
                raise UsageError("axioms takes at most one goal file")
            text, code = _axioms_one(
                args, _read(args.goal[0]) if args.goal else None)
            sys.stdout.write(text)
            return code
        if args.cmd == "check":
            paths = args.goal or [None]
            if len(paths) > 1:
                return _run_many(args, _check_one, paths)
            text, code = _check_one(args, paths[0])
            sys.stdout.write(text)
            return code
        raise UsageError(f"unknown subcommand {args.cmd!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
