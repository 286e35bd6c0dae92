"""Expansion of definitions into equational hypotheses.

`expand_constants` adds, for every defined constant reachable from the goal,
a hypothesis equating the constant with its body (a polymorphic equation
when the definition is polymorphic).  Opaque constants are skipped: backends
know arithmetic, and projection functions are meant to stay uninterpreted.

`replace_anon_fix` rewrites the recursive marker inside such an equation
back to the constant itself, so that after higher-order equalities are
eliminated the hypothesis becomes a plain recursive equation.
"""
from __future__ import annotations

from . import terms as T
from .checker import occurring_consts, occurring_relations
from .terms import (
    TYPE, Const, Eq, Fix, Goal, GlobalEnv, Hyp, Lam, Scheme, TypeVar, fresh,
    substitute,
)


def expansion_equation(env: GlobalEnv, name: str) -> T.Formula:
    entry = env.defs[name]
    if entry.body is None:
        raise KeyError(f"{name} has no definition to expand")
    if entry.scheme.vars:
        return Eq(entry.scheme, Const(name, ()), entry.body)
    return Eq(entry.scheme.body, Const(name, ()), entry.body)


def _expandable(env: GlobalEnv, name: str, opaque: set[str]) -> bool:
    if name in opaque or name in env.opaque:
        return False
    entry = env.defs.get(name)
    return entry is not None and entry.body is not None


def expand_constants(env: GlobalEnv, goal: Goal, opaque=(),
                     depth: int = 3, counterparts=None) -> Goal:
    """Add definition equations for constants occurring in the goal, then in
    the added equations themselves, up to `depth` rounds.

    `counterparts` optionally maps relation names to the constants that
    decide them; relations occurring in a scanned formula then seed their
    deciding constant, so a later logic translation finds its equations
    already in place."""
    opaque = set(opaque)
    counterparts = dict(counterparts or {})

    def seed(x, frontier: dict) -> None:
        for c in occurring_consts(x):
            frontier.setdefault(c)
        if counterparts:
            for r in occurring_relations(env, x):
                c = counterparts.get(r)
                if c is not None:
                    frontier.setdefault(c)

    frontier: dict[str, None] = {}
    for h in goal.hyps:
        seed(h.body, frontier)
    seed(goal.concl, frontier)

    expanded: set[str] = set()
    for h in goal.hyps:
        # an existing hypothesis of shape `c = body` counts as expanded
        if not h.is_var and isinstance(h.body, Eq) \
                and isinstance(h.body.lhs, Const) and not h.body.lhs.tyargs:
            expanded.add(h.body.lhs.name)

    names = {h.name for h in goal.hyps}
    hyps = list(goal.hyps)
    for _ in range(depth):
        todo = [c for c in frontier if c not in expanded
                and _expandable(env, c, opaque)]
        if not todo:
            break
        frontier = {}
        for c in todo:
            eq = expansion_equation(env, c)
            expanded.add(c)
            hname = fresh(f"def_{c}", names)
            names.add(hname)
            hyps.append(Hyp(hname, eq))
            seed(env.defs[c].body, frontier)
    return Goal(tuple(hyps), goal.concl)


def _strip_fix(name: str, body):
    """Rewrite `fun tyvars => fix f := e` into `fun tyvars => e[f := name]`,
    with the constant instantiated at the enclosing type variables."""
    tyvars: list[str] = []
    t = body
    while isinstance(t, Lam) and isinstance(t.ann, T.TypeSort):
        tyvars.append(t.var)
        t = t.body
    if not isinstance(t, Fix):
        return None
    repl = Const(name, tuple(TypeVar(a) for a in tyvars))
    inner = substitute(t.body, t.name, repl)
    for a in reversed(tyvars):
        inner = Lam(a, TYPE, inner)
    return inner


def replace_anon_fix(env: GlobalEnv, goal: Goal) -> Goal:
    """In definition equations whose right-hand side is a fixpoint, replace
    the fixpoint's self-reference by the defined constant and drop the
    fixpoint binder."""
    hyps = []
    for h in goal.hyps:
        if (not h.is_var and isinstance(h.body, Eq)
                and isinstance(h.body.lhs, Const) and not h.body.lhs.tyargs):
            new_rhs = _strip_fix(h.body.lhs.name, h.body.rhs)
            if new_rhs is not None:
                hyps.append(Hyp(h.name, Eq(h.body.ty, h.body.lhs, new_rhs)))
                continue
        hyps.append(h)
    return Goal(tuple(hyps), goal.concl)
