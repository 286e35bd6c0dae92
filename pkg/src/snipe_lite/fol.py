"""Reduction to first-order logic: higher-order equalities and prenex
polymorphism."""
from __future__ import annotations

import itertools

from . import terms as T
from .terms import (
    PROP, TYPE, Arrow, Const, Ctor, Eq, Forall, Goal, GlobalEnv, Hyp, IndTy,
    Lam, PredApp, Scheme, TypeVar, Var, arrow_split, forall_chain,
    forall_split, fresh, inst_ty_sub, mk_app, mk_eq, substitute,
)


class CapExceeded(T.SnipeError):
    pass


# ---------------------------------------------------------------------------
# Higher-order equalities


def _peel_tylams(t, tyvars: list[str]):
    """Strip leading type-lambdas, renaming their binders to `tyvars`."""
    sub: dict[str, T.Ty] = {}
    for a in tyvars:
        if not (isinstance(t, Lam) and isinstance(t.ann, T.TypeSort)):
            raise T.SnipeError("not enough type binders on equation side")
        sub[t.var] = TypeVar(a)
        t = t.body
    return inst_ty_sub(t, sub)


def _apply_side(t, args: list[T.Term]):
    """Apply a term to argument variables, beta-reducing lambda prefixes."""
    for a in args:
        if isinstance(t, Lam):
            t = substitute(t.body, t.var, a)
        else:
            t = T.App(t, a)
    return t


def _expand_ho_eq(eq: Eq) -> "T.Formula | None":
    if isinstance(eq.ty, Scheme):
        tyvars = list(eq.ty.vars)
        ty = eq.ty.body
    elif isinstance(eq.ty, Arrow):
        tyvars = []
        ty = eq.ty
    else:
        return None
    doms, cod = arrow_split(ty)
    if not doms and not tyvars:
        return None

    tyargs = tuple(TypeVar(a) for a in tyvars)

    def instantiate(side):
        if isinstance(side, Const) and not side.tyargs:
            return Const(side.name, tyargs) if tyargs else side
        if tyvars:
            return _peel_tylams(side, tyvars)
        return side

    lhs = instantiate(eq.lhs)
    rhs = instantiate(eq.rhs)

    # argument names: prefer the binder names of a lambda side
    names: list[str] = []
    probe = rhs if isinstance(rhs, Lam) else lhs
    used: set[str] = set(tyvars) | T.free_vars(lhs) | T.free_vars(rhs)
    for i, d in enumerate(doms):
        if isinstance(probe, Lam) and not isinstance(probe.ann, T.TypeSort):
            base = probe.var
            probe = probe.body
        else:
            base = f"x{i + 1}"
        n = fresh(base, used)
        used.add(n)
        names.append(n)

    args = [Var(n) for n in names]
    binders = [(a, TYPE) for a in tyvars] + list(zip(names, doms))
    if cod == PROP:
        if isinstance(lhs, Const):
            head: T.Formula = PredApp(lhs.name, lhs.tyargs, tuple(args))
        elif isinstance(lhs, Var) and not args:
            return None
        elif isinstance(lhs, Var):
            head = PredApp(lhs.name, (), tuple(args))
        else:
            return None
        body_r = _apply_side(rhs, args)
        if not T.is_formula(body_r):
            return None
        return forall_chain(binders, T.Iff(head, body_r))
    lhs_app = _apply_side(lhs, args)
    rhs_app = _apply_side(rhs, args)
    return forall_chain(binders, Eq(cod, lhs_app, rhs_app))


def eliminate_ho_equalities(env: GlobalEnv, goal: Goal) -> Goal:
    """Replace hypotheses equating functions (or polymorphic values) by the
    corresponding fully applied equations, universally quantified over the
    arguments; equations at Prop codomain become equivalences."""
    hyps = []
    for h in goal.hyps:
        if h.is_var:
            hyps.append(h)
            continue
        prefix, body = forall_split(h.body)
        if isinstance(body, Eq):
            expanded = _expand_ho_eq(body)
            if expanded is not None:
                hyps.append(Hyp(h.name, forall_chain(prefix, expanded)))
                continue
        hyps.append(h)
    return Goal(tuple(hyps), goal.concl)


# ---------------------------------------------------------------------------
# Monomorphization


def _type_prefix(f) -> tuple[list[str], T.Formula]:
    tyvars = []
    while isinstance(f, Forall) and isinstance(f.ann, T.TypeSort):
        tyvars.append(f.var)
        f = f.body
    return tyvars, f


def is_polymorphic_hyp(h: Hyp) -> bool:
    if h.is_var:
        return False
    tyvars, _ = _type_prefix(h.body)
    return bool(tyvars)


def _poly_slots(body, tyvars: set[str]):
    """Positions (inductive name, parameter index) at which each type
    variable of the hypothesis occurs applied."""
    slots: dict[str, dict[tuple[str, int], None]] = {a: {} for a in tyvars}

    def visit_params(ind: str, params):
        for i, p in enumerate(params):
            if isinstance(p, TypeVar) and p.name in tyvars:
                slots[p.name].setdefault((ind, i))

    from .checker import _walk

    def on_ty(ty):
        if isinstance(ty, IndTy) and ty.params:
            visit_params(ty.name, ty.params)

    def on_term(t):
        if isinstance(t, Ctor) and t.tyargs:
            visit_params(t.ind, t.tyargs)

    _walk(body, on_ty, on_term, lambda f: None)
    return slots


def _ground_candidates(env: GlobalEnv, goal: Goal):
    """Ground parameter instances found in the goal and the monomorphic
    hypotheses: (inductive name, position) -> ordered types."""
    found: dict[tuple[str, int], dict] = {}

    def visit_params(ind: str, params):
        for i, p in enumerate(params):
            if not T.free_tyvars(p):
                found.setdefault((ind, i), {}).setdefault(p)

    from .checker import _walk

    def on_ty(ty):
        if isinstance(ty, IndTy) and ty.params:
            visit_params(ty.name, ty.params)

    def on_term(t):
        if isinstance(t, Ctor) and t.tyargs:
            visit_params(t.ind, t.tyargs)

    sources = [goal.concl]
    for h in goal.hyps:
        if h.is_var or not is_polymorphic_hyp(h):
            sources.append(h.body)
    for s in sources:
        _walk(s, on_ty, on_term, lambda f: None)
    return {k: list(v) for k, v in found.items()}


def collect_instances(env: GlobalEnv, goal: Goal):
    """For each polymorphic hypothesis, the candidate ground types for each
    of its type variables, found by matching the applied inductives of the
    hypothesis against the goal and the monomorphic hypotheses."""
    candidates = _ground_candidates(env, goal)
    result: dict[str, dict[str, list]] = {}
    for h in goal.hyps:
        if not is_polymorphic_hyp(h):
            continue
        tyvars, body = _type_prefix(h.body)
        slots = _poly_slots(body, set(tyvars))
        per_var: dict[str, list] = {}
        for a in tyvars:
            tys: dict = {}
            for slot in slots[a]:
                for ty in candidates.get(slot, []):
                    tys.setdefault(ty)
            per_var[a] = list(tys)
        result[h.name] = per_var
    return result


def monomorphize(env: GlobalEnv, goal: Goal, cap: int = 64,
                 notes: "list | None" = None) -> Goal:
    """Instantiate every polymorphic hypothesis at the ground types collected
    by `collect_instances` (cartesian product over its type variables, capped
    at `cap` per hypothesis).  The polymorphic originals are removed: they
    cannot be given to a first-order backend."""
    instances = collect_instances(env, goal)
    names = {h.name for h in goal.hyps}
    hyps: list[Hyp] = []
    for h in goal.hyps:
        if not is_polymorphic_hyp(h):
            hyps.append(h)
            continue
        tyvars, body = _type_prefix(h.body)
        sets = [instances[h.name].get(a, []) for a in tyvars]
        if any(not s for s in sets):
            if notes is not None:
                missing = [a for a, s in zip(tyvars, sets) if not s]
                notes.append(f"dropped {h.name}: no ground instances for "
                             + ", ".join(missing))
            names.discard(h.name)
            continue
        combos = list(itertools.product(*sets))
        if len(combos) > cap:
            raise CapExceeded(
                f"{h.name}: {len(combos)} instantiations exceed the cap of {cap}")
        names.discard(h.name)
        for k, combo in enumerate(combos, 1):
            inst = inst_ty_sub(body, dict(zip(tyvars, combo)))
            base = h.name if len(combos) == 1 else f"{h.name}_{k}"
            n = fresh(base, names)
            names.add(n)
            hyps.append(Hyp(n, inst))
    return Goal(tuple(hyps), goal.concl)
