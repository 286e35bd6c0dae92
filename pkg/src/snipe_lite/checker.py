"""Typechecking of elaborated trees, weak-head normalization, and
occurrence analysis used by the transformation passes.

`typecheck` is syntax-directed: elaboration has already filled in every
type argument and binder annotation, so no unification happens here.  It is
used as a post-condition check by tests and by the knowledge-base validator.
"""
from __future__ import annotations

from . import terms as T
from .terms import (
    BOOL, INT, PROP, TYPE, Arrow, BaseTy, BoolLit, Const, Ctor, Eq, Fix,
    Forall, GlobalEnv, IndTy, IntLit, Lam, Match, PredApp, Scheme, TypeVar,
    Var, arrow_split, mono, spine, subst_ty,
)
from .syntax import ArityError, TypecheckError, UnboundVariable, UnknownIdentifier


class FuelExhausted(T.SnipeError):
    pass


def _expect(actual, expected, what: str) -> None:
    if actual != expected:
        from .printer import print_ty
        a = print_ty(actual) if not isinstance(actual, T.TypeSort) else "Type"
        e = print_ty(expected) if not isinstance(expected, T.TypeSort) else "Type"
        raise TypecheckError(f"{what}: expected {e}, found {a}")


def check_type_wf(env: GlobalEnv, ty, tyvars: set[str], what: str = "type") -> None:
    if isinstance(ty, TypeVar):
        if ty.name not in tyvars:
            raise UnboundVariable(f"{what}: unbound type variable {ty.name}")
        return
    if isinstance(ty, BaseTy):
        if ty.name not in env.base_sorts:
            raise UnknownIdentifier(f"{what}: unknown sort {ty.name}")
        return
    if isinstance(ty, (T.IntTy, T.BoolTy, T.PropTy)):
        return
    if isinstance(ty, Arrow):
        check_type_wf(env, ty.dom, tyvars, what)
        check_type_wf(env, ty.cod, tyvars, what)
        return
    if isinstance(ty, IndTy):
        decl = env.inductives.get(ty.name)
        if decl is None:
            raise UnknownIdentifier(f"{what}: unknown inductive {ty.name}")
        if len(ty.params) != len(decl.params):
            raise ArityError(f"{what}: {ty.name} expects {len(decl.params)}"
                             f" parameter(s)")
        for p in ty.params:
            check_type_wf(env, p, tyvars, what)
        return
    raise TypecheckError(f"{what}: not a type: {ty!r}")


def typecheck(env: GlobalEnv, ctx: dict, x):
    """Return the type of a term (a Ty) or PROP for a formula.

    `ctx` maps local names to types; type variables map to TYPE.
    """
    tyvars = {n for n, t in ctx.items() if t is TYPE}

    if T.is_formula(x):
        _check_formula(env, dict(ctx), tyvars, x)
        return PROP
    return _infer_term(env, dict(ctx), tyvars, x)


def _infer_term(env, ctx, tyvars, t):
    if isinstance(t, Var):
        if t.name not in ctx:
            raise UnboundVariable(f"unbound variable {t.name}")
        ty = ctx[t.name]
        if ty is TYPE:
            raise TypecheckError(f"type variable {t.name} used as a term")
        return ty
    if isinstance(t, IntLit):
        return INT
    if isinstance(t, BoolLit):
        return BOOL
    if isinstance(t, Const):
        sch = env.const_scheme(t.name)
        if sch is None:
            raise UnknownIdentifier(f"unknown constant {t.name}")
        if len(t.tyargs) != len(sch.vars):
            raise ArityError(f"{t.name}: expected {len(sch.vars)} type argument(s)")
        for a in t.tyargs:
            check_type_wf(env, a, tyvars, t.name)
        return subst_ty(sch.body, dict(zip(sch.vars, t.tyargs)))
    if isinstance(t, Ctor):
        decl = env.inductives.get(t.ind)
        if decl is None:
            raise UnknownIdentifier(f"unknown inductive {t.ind}")
        cd = decl.ctor(t.name)
        if len(t.tyargs) != len(decl.params):
            raise ArityError(f"{t.name}: expected {len(decl.params)} type argument(s)")
        if len(t.args) != len(cd.binders):
            raise ArityError(f"constructor {t.name} must be fully applied")
        for a in t.tyargs:
            check_type_wf(env, a, tyvars, t.name)
        for a, ety in zip(t.args, env.ctor_arg_tys(t.ind, t.name, t.tyargs)):
            _expect(_infer_term(env, ctx, tyvars, a), ety, f"argument of {t.name}")
        return IndTy(t.ind, t.tyargs)
    if isinstance(t, T.App):
        fty = _infer_term(env, ctx, tyvars, t.fn)
        if not isinstance(fty, Arrow):
            raise TypecheckError("application of a non-function")
        _expect(_infer_term(env, ctx, tyvars, t.arg), fty.dom, "application")
        return fty.cod
    if isinstance(t, Lam):
        if t.ann is TYPE or isinstance(t.ann, T.TypeSort):
            raise TypecheckError(
                "type-level lambda outside a polymorphic definition body")
        check_type_wf(env, t.ann, tyvars, f"binder {t.var}")
        ctx2 = dict(ctx)
        ctx2[t.var] = t.ann
        if T.is_formula(t.body):
            _check_formula(env, ctx2, tyvars, t.body)
            return Arrow(t.ann, PROP)
        return Arrow(t.ann, _infer_term(env, ctx2, tyvars, t.body))
    if isinstance(t, Match):
        sty = _infer_term(env, ctx, tyvars, t.scrutinee)
        if t.ind == "bool":
            _expect(sty, BOOL, "match scrutinee")
            order = ["true", "false"]
            binder_tys = {"true": [], "false": []}
        else:
            if not (isinstance(sty, IndTy) and sty.name == t.ind):
                raise TypecheckError(f"match scrutinee is not of type {t.ind}")
            decl = env.inductives[t.ind]
            if decl.is_prop:
                raise TypecheckError("cannot match on a relation")
            order = [c.name for c in decl.ctors]
            binder_tys = {c.name: env.ctor_arg_tys(t.ind, c.name, sty.params)
                          for c in decl.ctors}
        if [b.ctor for b in t.branches] != order:
            raise TypecheckError(
                f"match must cover constructors of {t.ind} exactly once,"
                f" in declaration order")
        rty = None
        for b in t.branches:
            tys = binder_tys[b.ctor]
            if len(b.binders) != len(tys):
                raise ArityError(f"branch {b.ctor} binds {len(tys)} argument(s)")
            ctx2 = dict(ctx)
            for n, bt in zip(b.binders, tys):
                ctx2[n] = bt
            bty = _infer_term(env, ctx2, tyvars, b.rhs)
            if rty is None:
                rty = bty
            else:
                _expect(bty, rty, f"branch {b.ctor}")
        return rty
    if isinstance(t, Fix):
        if isinstance(t.ann, Scheme):
            raise TypecheckError("fix annotations must be monomorphic")
        check_type_wf(env, t.ann, tyvars, f"fix {t.name}")
        ctx2 = dict(ctx)
        ctx2[t.name] = t.ann
        _expect(_infer_term(env, ctx2, tyvars, t.body), t.ann, f"fix {t.name}")
        return t.ann
    raise TypecheckError(f"not a term: {t!r}")


def typecheck_value(env: GlobalEnv, body) -> Scheme:
    """Type of a definition body: peels leading type lambdas into a Scheme."""
    vars: list[str] = []
    ctx: dict = {}
    while isinstance(body, Lam) and (body.ann is TYPE or isinstance(body.ann, T.TypeSort)):
        vars.append(body.var)
        ctx[body.var] = TYPE
        body = body.body
    ty = typecheck(env, ctx, body)
    return Scheme(tuple(vars), ty)


def _check_formula(env, ctx, tyvars, f) -> None:
    if isinstance(f, Forall):
        ctx2 = dict(ctx)
        if f.ann is TYPE or isinstance(f.ann, T.TypeSort):
            ctx2[f.var] = TYPE
            _check_formula(env, ctx2, tyvars | {f.var}, f.body)
            return
        check_type_wf(env, f.ann, tyvars, f"binder {f.var}")
        ctx2[f.var] = f.ann
        _check_formula(env, ctx2, tyvars, f.body)
        return
    if isinstance(f, T.Exists):
        check_type_wf(env, f.ann, tyvars, f"binder {f.var}")
        ctx2 = dict(ctx)
        ctx2[f.var] = f.ann
        _check_formula(env, ctx2, tyvars, f.body)
        return
    if isinstance(f, (T.Impl, T.And, T.Or, T.Iff)):
        _check_formula(env, ctx, tyvars, f.lhs)
        _check_formula(env, ctx, tyvars, f.rhs)
        return
    if isinstance(f, T.Not):
        _check_formula(env, ctx, tyvars, f.body)
        return
    if isinstance(f, Eq):
        if isinstance(f.ty, Scheme):
            lsch = (typecheck_value(env, f.lhs) if not isinstance(f.lhs, Const)
                    else env.const_scheme(f.lhs.name))
            rsch = typecheck_value(env, f.rhs)
            for sch in (lsch, rsch):
                if sch is None or len(sch.vars) != len(f.ty.vars):
                    raise TypecheckError("scheme equation arity mismatch")
                ren = dict(zip(sch.vars, (TypeVar(v) for v in f.ty.vars)))
                if subst_ty(sch.body, ren) != f.ty.body:
                    raise TypecheckError("scheme equation type mismatch")
            return
        check_type_wf(env, f.ty, tyvars, "equality")
        _expect(_infer_term(env, ctx, tyvars, f.lhs), f.ty, "equality lhs")
        _expect(_infer_term(env, ctx, tyvars, f.rhs), f.ty, "equality rhs")
        return
    if isinstance(f, PredApp):
        if f.name in ctx and ctx[f.name] is not TYPE:
            tys, cod = arrow_split(ctx[f.name])
            if cod != PROP or len(f.args) != len(tys):
                raise TypecheckError(f"{f.name} is not a predicate of arity"
                                     f" {len(f.args)}")
        elif env.is_relation(f.name):
            tys = list(env.inductives[f.name].index_tys)
            if len(f.args) != len(tys):
                raise ArityError(f"relation {f.name} expects {len(tys)} argument(s)")
        elif f.name in T.BUILTIN_RELS:
            tys = list(T.BUILTIN_RELS[f.name])
            if len(f.args) != len(tys):
                raise ArityError(f"{f.name} expects {len(tys)} argument(s)")
        else:
            sch = env.const_scheme(f.name)
            if sch is None:
                raise UnknownIdentifier(f"unknown predicate {f.name}")
            if len(f.tyargs) != len(sch.vars):
                raise ArityError(f"{f.name}: type argument count")
            body = subst_ty(sch.body, dict(zip(sch.vars, f.tyargs)))
            tys, cod = arrow_split(body)
            if cod != PROP or len(f.args) != len(tys):
                raise TypecheckError(f"{f.name} is not a predicate of arity"
                                     f" {len(f.args)}")
        for a, ety in zip(f.args, tys):
            _expect(_infer_term(env, ctx, tyvars, a), ety, f"argument of {f.name}")
        return
    if isinstance(f, T.IsTrue):
        _expect(_infer_term(env, ctx, tyvars, f.arg), BOOL, "boolean coercion")
        return
    if isinstance(f, (T.TrueF, T.FalseF)):
        return
    raise TypecheckError(f"not a formula: {f!r}")


def typecheck_goal(env: GlobalEnv, goal: T.Goal) -> None:
    ctx: dict = {}
    for h in goal.hyps:
        if h.is_var:
            check_type_wf(env, h.body, set(), f"variable {h.name}")
            ctx[h.name] = h.body
        else:
            _check_formula(env, ctx, set(), h.body)
    _check_formula(env, ctx, set(), goal.concl)


# ---------------------------------------------------------------------------
# Weak-head normalization


def _def_value(env: GlobalEnv, name: str, tyargs):
    """Body of a definition instantiated at the given type arguments, with
    leading type lambdas peeled."""
    entry = env.defs.get(name)
    if entry is None or entry.body is None:
        return None
    body = entry.body
    sub: dict[str, object] = {}
    for v in entry.scheme.vars:
        if not (isinstance(body, Lam) and (body.ann is TYPE
                                           or isinstance(body.ann, T.TypeSort))):
            return None
        sub[body.var] = None  # placeholder; names matched positionally below
        body = body.body
    names = list(sub.keys())
    tysub = dict(zip(names, tyargs))
    return T.inst_ty_sub(body, tysub) if tysub else body


def whnf_unfold(env: GlobalEnv, t, triggers: "set[str] | frozenset[str]",
                fuel: int = 100_000):
    """Weak-head normal form, delta-unfolding only constants in `triggers`.

    Reduces beta redexes, match-on-constructor, and applied fixpoints along
    the way.  Stuck terms are returned as-is.
    """
    while True:
        if fuel <= 0:
            raise FuelExhausted("whnf_unfold: out of fuel")
        fuel -= 1
        head, args = spine(t)
        if isinstance(head, Const) and head.name in triggers:
            body = _def_value(env, head.name, head.tyargs)
            if body is not None:
                t = T.mk_app(body, args)
                continue
        if isinstance(head, Lam) and args and not (
                head.ann is TYPE or isinstance(head.ann, T.TypeSort)):
            if T.is_formula(head.body):
                return t  # formula-valued redex: not a term reduction
            t = T.mk_app(T.substitute(head.body, head.var, args[0]), args[1:])
            continue
        if isinstance(head, Match):
            scrut = whnf_unfold(env, head.scrutinee, triggers, fuel)
            picked = None
            if isinstance(scrut, Ctor):
                for b in head.branches:
                    if b.ctor == scrut.name:
                        picked = T.subst_parallel(
                            b.rhs, dict(zip(b.binders, scrut.args)))
                        break
            elif isinstance(scrut, BoolLit):
                want = "true" if scrut.value else "false"
                for b in head.branches:
                    if b.ctor == want:
                        picked = b.rhs
                        break
            if picked is not None:
                t = T.mk_app(picked, args)
                continue
            return T.mk_app(Match(scrut, head.ind, head.branches), args)
        if isinstance(head, Fix) and args:
            unfolded = T.substitute(head.body, head.name, head)
            t = T.mk_app(unfolded, args)
            continue
        return t


# ---------------------------------------------------------------------------
# Occurrence analysis


def _walk(x, on_ty, on_term, on_formula) -> None:
    if isinstance(x, (TypeVar, BaseTy, T.IntTy, T.BoolTy, T.PropTy)):
        on_ty(x)
        return
    if isinstance(x, Arrow):
        on_ty(x)
        _walk(x.dom, on_ty, on_term, on_formula)
        _walk(x.cod, on_ty, on_term, on_formula)
        return
    if isinstance(x, IndTy):
        on_ty(x)
        for p in x.params:
            _walk(p, on_ty, on_term, on_formula)
        return
    if isinstance(x, Scheme):
        _walk(x.body, on_ty, on_term, on_formula)
        return
    if isinstance(x, T.TypeSort):
        return
    if T.is_term(x):
        on_term(x)
        if isinstance(x, Const):
            for a in x.tyargs:
                _walk(a, on_ty, on_term, on_formula)
        elif isinstance(x, Ctor):
            for a in x.tyargs:
                _walk(a, on_ty, on_term, on_formula)
            for a in x.args:
                _walk(a, on_ty, on_term, on_formula)
        elif isinstance(x, T.App):
            _walk(x.fn, on_ty, on_term, on_formula)
            _walk(x.arg, on_ty, on_term, on_formula)
        elif isinstance(x, Lam):
            if not isinstance(x.ann, T.TypeSort):
                _walk(x.ann, on_ty, on_term, on_formula)
            _walk(x.body, on_ty, on_term, on_formula)
        elif isinstance(x, Match):
            _walk(x.scrutinee, on_ty, on_term, on_formula)
            for b in x.branches:
                _walk(b.rhs, on_ty, on_term, on_formula)
        elif isinstance(x, Fix):
            if not isinstance(x.ann, (T.TypeSort, Scheme)):
                _walk(x.ann, on_ty, on_term, on_formula)
            _walk(x.body, on_ty, on_term, on_formula)
        return
    if T.is_formula(x):
        on_formula(x)
        if isinstance(x, (Forall, T.Exists)):
            if not isinstance(x.ann, T.TypeSort):
                _walk(x.ann, on_ty, on_term, on_formula)
            _walk(x.body, on_ty, on_term, on_formula)
        elif isinstance(x, (T.Impl, T.And, T.Or, T.Iff)):
            _walk(x.lhs, on_ty, on_term, on_formula)
            _walk(x.rhs, on_ty, on_term, on_formula)
        elif isinstance(x, T.Not):
            _walk(x.body, on_ty, on_term, on_formula)
        elif isinstance(x, Eq):
            if not isinstance(x.ty, Scheme):
                _walk(x.ty, on_ty, on_term, on_formula)
            _walk(x.lhs, on_ty, on_term, on_formula)
            _walk(x.rhs, on_ty, on_term, on_formula)
        elif isinstance(x, PredApp):
            for a in x.tyargs:
                _walk(a, on_ty, on_term, on_formula)
            for a in x.args:
                _walk(a, on_ty, on_term, on_formula)
        elif isinstance(x, T.IsTrue):
            _walk(x.arg, on_ty, on_term, on_formula)
        return
    raise TypeError(f"walk: {x!r}")


def occurring_inductives(x) -> list[str]:
    """Names of inductive types occurring anywhere (types, ctors, matches),
    in first-occurrence order."""
    seen: dict[str, None] = {}

    def on_ty(ty):
        if isinstance(ty, IndTy):
            seen.setdefault(ty.name)

    def on_term(t):
        if isinstance(t, Ctor):
            seen.setdefault(t.ind)
        elif isinstance(t, Match) and t.ind != "bool":
            seen.setdefault(t.ind)

    _walk(x, on_ty, on_term, lambda f: None)
    return list(seen)


def occurring_relations(env: GlobalEnv, x) -> list[str]:
    seen: dict[str, None] = {}

    def on_formula(f):
        if isinstance(f, PredApp) and env.is_relation(f.name):
            seen.setdefault(f.name)

    _walk(x, lambda t: None, lambda t: None, on_formula)
    return list(seen)


def occurring_consts(x) -> list[str]:
    seen: dict[str, None] = {}

    def on_term(t):
        if isinstance(t, Const):
            seen.setdefault(t.name)

    def on_formula(f):
        if isinstance(f, PredApp):
            seen.setdefault(f.name)

    _walk(x, lambda t: None, on_term, on_formula)
    return list(seen)


def contains_match(x) -> bool:
    found = [False]

    def on_term(t):
        if isinstance(t, Match):
            found[0] = True

    _walk(x, lambda t: None, on_term, lambda f: None)
    return found[0]


def contains_fix(x) -> bool:
    found = [False]

    def on_term(t):
        if isinstance(t, Fix):
            found[0] = True

    _walk(x, lambda t: None, on_term, lambda f: None)
    return found[0]
