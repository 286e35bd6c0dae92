"""Interpretation of inductive types and relations.

Transformations that turn the inductive structure of declared types into
plain first-order statements a backend can use:

* inversion principles for inductive relations;
* disjointness / injectivity / generation axioms for algebraic data types;
* projection functions plus existential-free generation statements;
* elimination of pattern matching from hypotheses.

All goal-level functions are idempotent: statements already present (up to
alpha-equivalence) are not added twice.
"""
from __future__ import annotations

from . import terms as T
from .checker import occurring_inductives, occurring_relations, typecheck
from .terms import (
    BOOL, INT, PROP, TYPE, Arrow, BaseTy, BoolLit, Const, Ctor, Eq, Forall,
    Goal, GlobalEnv, Hyp, IndTy, IntLit, Lam, Match, PredApp, Scheme, TypeVar,
    Var, conj, disj, exists_chain, forall_chain, forall_split, fresh,
    impl_chain, mk_app, mk_eq, subst_parallel, subst_ty,
)


class TransformError(T.SnipeError):
    pass


def _hyp_names(goal: Goal) -> set[str]:
    return {h.name for h in goal.hyps}


def _already_present(goal: Goal, f: T.Formula) -> bool:
    return any(not h.is_var and T.alpha_eq(h.body, f) for h in goal.hyps)


def _add_hyps(goal: Goal, new: list[tuple[str, T.Formula]]) -> Goal:
    names = _hyp_names(goal)
    hyps = list(goal.hyps)
    for base, f in new:
        if _already_present(Goal(tuple(hyps), goal.concl), f):
            continue
        name = fresh(base, names)
        names.add(name)
        hyps.append(Hyp(name, f))
    return Goal(tuple(hyps), goal.concl)


# ---------------------------------------------------------------------------
# Inversion principles for inductive relations


def inv_principle(env: GlobalEnv, rel: str) -> T.Formula:
    """``forall args, R args <-> (one disjunct per constructor)`` where each
    disjunct existentially binds the constructor's (primed) variables and
    conjoins its premises with equations tying the arguments to the
    constructor's indices."""
    decl = env.inductives[rel]
    if not decl.is_prop:
        raise TransformError(f"{rel} is not an inductive relation")
    outer = [(f"x{i + 1}", ty) for i, ty in enumerate(decl.index_tys)]
    avoid = {n for n, _ in outer}
    disjuncts = []
    for c in decl.ctors:
        ren: dict[str, T.Term] = {}
        binders: list[tuple[str, T.Ty]] = []
        used = set(avoid)
        for b, ty in c.binders:
            b2 = fresh(b + "'", used)
            used.add(b2)
            ren[b] = Var(b2)
            binders.append((b2, ty))
        parts: list[T.Formula] = [subst_parallel(p, ren) for p in c.premises]
        for (xn, xty), idx in zip(outer, c.indices):
            parts.append(mk_eq(xty, Var(xn), subst_parallel(idx, ren)))
        matrix = conj(parts) if parts else T.TrueF()
        disjuncts.append(exists_chain(binders, matrix))
    head = PredApp(rel, (), tuple(Var(n) for n, _ in outer))
    return forall_chain(outer, T.Iff(head, disj(disjuncts)))


def inv_principle_all(env: GlobalEnv, goal: Goal) -> Goal:
    rels: dict[str, None] = {}
    for h in goal.hyps:
        if not h.is_var:
            for r in occurring_relations(env, h.body):
                rels.setdefault(r)
    for r in occurring_relations(env, goal.concl):
        rels.setdefault(r)
    return _add_hyps(goal, [(f"inv_{r}", inv_principle(env, r))
                            for r in rels])


# ---------------------------------------------------------------------------
# ADT axioms: disjointness, injectivity, generation


def _adt_header(decl: T.InductiveDecl):
    params = [(p, TYPE) for p in decl.params]
    tyargs = tuple(TypeVar(p) for p in decl.params)
    return params, tyargs, IndTy(decl.name, tyargs)


def _ctor_app(decl, c, tyargs, names):
    return Ctor(decl.name, c.name, tyargs, tuple(Var(n) for n in names))


def disjointness_axioms(env: GlobalEnv, ind: str) -> list[tuple[str, T.Formula]]:
    decl = env.inductives[ind]
    params, tyargs, ty = _adt_header(decl)
    sub = dict(zip(decl.params, tyargs))
    out = []
    pairs = [(a, b) for i, a in enumerate(decl.ctors)
             for b in decl.ctors[i + 1:]]
    for ci, cj in pairs:
        binders: list[tuple[str, T.Ty]] = []
        used: set[str] = set()
        argn_i, argn_j = [], []
        for b, bty in reversed(ci.binders):
            n = fresh(b, used)
            used.add(n)
            binders.append((n, subst_ty(bty, sub)))
            argn_i.insert(0, n)
        for b, bty in reversed(cj.binders):
            n = fresh(b, used)
            used.add(n)
            binders.append((n, subst_ty(bty, sub)))
            argn_j.insert(0, n)
        body = T.Not(Eq(ty, _ctor_app(decl, ci, tyargs, argn_i),
                        _ctor_app(decl, cj, tyargs, argn_j)))
        name = (f"D_{ind}" if len(pairs) == 1
                else f"D_{ind}_{ci.name}_{cj.name}")
        out.append((name, forall_chain(params + binders, body)))
    return out


def injectivity_axioms(env: GlobalEnv, ind: str) -> list[tuple[str, T.Formula]]:
    decl = env.inductives[ind]
    params, tyargs, ty = _adt_header(decl)
    sub = dict(zip(decl.params, tyargs))
    with_args = [c for c in decl.ctors if c.binders]
    out = []
    for c in with_args:
        binders: list[tuple[str, T.Ty]] = []
        used: set[str] = set()
        plain, primed = [], []
        for b, bty in reversed(c.binders):
            n = fresh(b, used)
            used.add(n)
            n2 = fresh(b + "'", used)
            used.add(n2)
            bt = subst_ty(bty, sub)
            binders.append((n, bt))
            binders.append((n2, bt))
            plain.insert(0, (n, bt))
            primed.insert(0, n2)
        prem = Eq(ty, _ctor_app(decl, c, tyargs, [n for n, _ in plain]),
                  _ctor_app(decl, c, tyargs, primed))
        concl = conj([mk_eq(bt, Var(n), Var(n2))
                      for (n, bt), n2 in zip(plain, primed)])
        name = f"I_{ind}" if len(with_args) == 1 else f"I_{ind}_{c.name}"
        out.append((name, forall_chain(params + binders,
                                       T.Impl(prem, concl))))
    return out


def generation_axiom(env: GlobalEnv, ind: str) -> tuple[str, T.Formula]:
    decl = env.inductives[ind]
    params, tyargs, ty = _adt_header(decl)
    sub = dict(zip(decl.params, tyargs))
    tname = fresh(ind[0], {p for p, _ in params})
    disjuncts = []
    for c in decl.ctors:
        used = {tname} | {p for p, _ in params}
        binders: list[tuple[str, T.Ty]] = []
        names = []
        for b, bty in c.binders:
            n = b if b not in used else fresh(b + "'", used)
            used.add(n)
            binders.append((n, subst_ty(bty, sub)))
            names.append(n)
        eq = mk_eq(ty, Var(tname), _ctor_app(decl, c, tyargs, names))
        disjuncts.append(exists_chain(binders, eq))
    return f"G_{ind}", forall_chain(params + [(tname, ty)], disj(disjuncts))


def adt_axiom_statements(env: GlobalEnv, ind: str,
                         kinds: str = "DIG") -> list[tuple[str, T.Formula]]:
    decl = env.inductives.get(ind)
    if decl is None or decl.is_prop:
        raise TransformError(f"{ind} is not an algebraic data type")
    out: list[tuple[str, T.Formula]] = []
    if "D" in kinds and len(decl.ctors) > 1:
        out.extend(disjointness_axioms(env, ind))
    if "I" in kinds:
        out.extend(injectivity_axioms(env, ind))
    if "G" in kinds:
        out.append(generation_axiom(env, ind))
    return out


def _goal_inductives(env: GlobalEnv, goal: Goal) -> list[str]:
    seen: dict[str, None] = {}
    for h in goal.hyps:
        for name in occurring_inductives(h.body):
            seen.setdefault(name)
    for name in occurring_inductives(goal.concl):
        seen.setdefault(name)
    return [n for n in seen
            if n in env.inductives and env.inductives[n].is_adt]


def adt_axioms(env: GlobalEnv, goal: Goal, kinds: str = "DIG",
               inds: "list[str] | None" = None) -> Goal:
    if inds is None:
        inds = _goal_inductives(env, goal)
    new: list[tuple[str, T.Formula]] = []
    for ind in inds:
        new.extend(adt_axiom_statements(env, ind, kinds))
    return _add_hyps(goal, new)


# ---------------------------------------------------------------------------
# Projections and existential-free generation statements


def inhabitant(env: GlobalEnv, ty, _seen: "frozenset[str]" = frozenset()):
    """A closed canonical term of the given type, or None."""
    if isinstance(ty, T.IntTy):
        return IntLit(0)
    if isinstance(ty, T.BoolTy):
        return BoolLit(True)
    if isinstance(ty, IndTy):
        if ty.name in _seen:
            return None
        decl = env.inductives.get(ty.name)
        if decl is None or decl.is_prop:
            return None
        sub = dict(zip(decl.params, ty.params))
        for c in decl.ctors:
            args = []
            for _, bty in c.binders:
                a = inhabitant(env, subst_ty(bty, sub), _seen | {ty.name})
                if a is None:
                    break
                args.append(a)
            else:
                return Ctor(ty.name, c.name, ty.params, tuple(args))
    return None


def gen_projections(env: GlobalEnv, ind: str) -> dict[tuple[int, int], str]:
    """Declare one projection per constructor argument of an ADT; returns a
    map from (constructor number, argument number), both 1-based, to the
    projection's name.  Projections already declared are reused.  The
    definitions are opaque: they exist to justify the generation statements,
    not to be expanded."""
    decl = env.inductives.get(ind)
    if decl is None or decl.is_prop:
        raise TransformError(f"{ind} is not an algebraic data type")
    params, tyargs, ty = _adt_header(decl)
    sub = dict(zip(decl.params, tyargs))
    out: dict[tuple[int, int], str] = {}
    for i, c in enumerate(decl.ctors, 1):
        arg_tys = [subst_ty(bty, sub) for _, bty in c.binders]
        for j, argty in enumerate(arg_tys, 1):
            scrut = fresh(ind[0], {"default"} | {n for n, _ in c.binders})
            branches = []
            for c2 in decl.ctors:
                used = {"default", scrut}
                bs = []
                for b, _ in c2.binders:
                    n = b if b not in used else fresh(b, used)
                    used.add(n)
                    bs.append(n)
                rhs = Var(bs[j - 1]) if c2.name == c.name else Var("default")
                branches.append(T.Branch(c2.name, tuple(bs), rhs))
            body = Lam("default", argty,
                       Lam(scrut, ty, Match(Var(scrut), ind, tuple(branches))))
            for p, _ in reversed(params):
                body = Lam(p, TYPE, body)
            scheme = Scheme(tuple(decl.params), T.arrow(argty, ty, argty))
            candidates = [f"proj_{i}_{j}", f"{ind}_proj_{i}_{j}"]
            name = None
            for cand in candidates:
                existing = env.defs.get(cand)
                if existing is None:
                    name = cand
                    env.declare_def(T.DefEntry(cand, scheme, body),
                                    opaque=True)
                    break
                if (existing.body is not None
                        and T.alpha_eq(existing.body, body)):
                    name = cand
                    break
            if name is None:
                raise TransformError(
                    f"projection name collision for {ind} ({i},{j})")
            out[(i, j)] = name
    return out


def _gen_defaults(env: GlobalEnv, decl, tyargs, avoid: set[str]):
    """Default terms per constructor argument: a closed inhabitant when one
    exists, otherwise a shared quantified variable per argument type."""
    sub = dict(zip(decl.params, tyargs))
    binders: list[tuple[str, T.Ty]] = []
    by_ty: dict = {}
    defaults: dict[tuple[int, int], T.Term] = {}
    for i, c in enumerate(decl.ctors, 1):
        for j, (_, bty) in enumerate(c.binders, 1):
            argty = subst_ty(bty, sub)
            t = inhabitant(env, argty)
            if t is None:
                if argty not in by_ty:
                    base = (argty.name.lower() if isinstance(argty, (TypeVar, BaseTy))
                            else "d")
                    n = fresh(base, avoid)
                    avoid.add(n)
                    by_ty[argty] = Var(n)
                    binders.append((n, argty))
                t = by_ty[argty]
            defaults[(i, j)] = t
    return binders, defaults


def _gen_disjunction(env: GlobalEnv, decl, tyargs, ty, subject: T.Term,
                     projs, defaults) -> T.Formula:
    disjuncts = []
    for i, c in enumerate(decl.ctors, 1):
        args = [mk_app(Const(projs[(i, j)], tyargs),
                       [defaults[(i, j)], subject])
                for j in range(1, len(c.binders) + 1)]
        disjuncts.append(mk_eq(ty, subject,
                               Ctor(decl.name, c.name, tyargs, tuple(args))))
    return disj(disjuncts)


def gen_statement(env: GlobalEnv, ind: str) -> T.Formula:
    """Existential-free generation statement for an ADT, quantified over its
    type parameters, a subject term, and any default values that have no
    closed inhabitant."""
    decl = env.inductives[ind]
    params, tyargs, ty = _adt_header(decl)
    projs = gen_projections(env, ind)
    tname = fresh(ind[0], {p for p, _ in params})
    avoid = {tname} | {p for p, _ in params}
    dbinders, defaults = _gen_defaults(env, decl, tyargs, avoid)
    body = _gen_disjunction(env, decl, tyargs, ty, Var(tname), projs, defaults)
    return forall_chain(params + [(tname, ty)] + dbinders, body)


def gen_statement_for(env: GlobalEnv, ind: str, tyargs: tuple,
                      subject: T.Term) -> T.Formula:
    """Generation statement specialized to a particular subject term of a
    concrete instance of the ADT (no leading universal quantifier)."""
    decl = env.inductives[ind]
    ty = IndTy(ind, tyargs)
    projs = gen_projections(env, ind)
    avoid = set(T.free_vars(subject))
    dbinders, defaults = _gen_defaults(env, decl, tyargs, avoid)
    body = _gen_disjunction(env, decl, tyargs, ty, subject, projs, defaults)
    return forall_chain(dbinders, body)


def get_gen_statements_for_variables_in_context(env: GlobalEnv,
                                                goal: Goal) -> Goal:
    new = []
    for h in goal.hyps:
        if h.is_var and isinstance(h.body, IndTy):
            decl = env.inductives.get(h.body.name)
            if decl is not None and decl.is_adt:
                f = gen_statement_for(env, h.body.name, h.body.params,
                                      Var(h.name))
                new.append((f"gen_{h.body.name}_{h.name}", f))
    return _add_hyps(goal, new)


# ---------------------------------------------------------------------------
# Elimination of pattern matching


def _find_match(x, under_binder: bool = False):
    """First Match subterm in pre-order whose free variables are not bound
    below the hypothesis prefix (we do not descend into lambdas or
    quantifier bodies)."""
    if T.is_term(x):
        if isinstance(x, Match):
            return x
        if isinstance(x, T.App):
            return _find_match(x.fn) or _find_match(x.arg)
        if isinstance(x, Ctor):
            for a in x.args:
                m = _find_match(a)
                if m is not None:
                    return m
        return None
    if T.is_formula(x):
        if isinstance(x, (T.Impl, T.And, T.Or, T.Iff)):
            return _find_match(x.lhs) or _find_match(x.rhs)
        if isinstance(x, T.Not):
            return _find_match(x.body)
        if isinstance(x, Eq):
            return _find_match(x.lhs) or _find_match(x.rhs)
        if isinstance(x, T.IsTrue):
            return _find_match(x.arg)
        if isinstance(x, PredApp):
            for a in x.args:
                m = _find_match(a)
                if m is not None:
                    return m
        return None
    return None


def _replace_everywhere(x, target, replacement):
    if x == target:
        return replacement
    if isinstance(x, (Var, Const, IntLit, BoolLit)):
        return x
    if isinstance(x, Ctor):
        return Ctor(x.ind, x.name, x.tyargs,
                    tuple(_replace_everywhere(a, target, replacement)
                          for a in x.args))
    if isinstance(x, T.App):
        return T.App(_replace_everywhere(x.fn, target, replacement),
                     _replace_everywhere(x.arg, target, replacement))
    if isinstance(x, Match):
        return Match(_replace_everywhere(x.scrutinee, target, replacement),
                     x.ind,
                     tuple(T.Branch(b.ctor, b.binders,
                                    _replace_everywhere(b.rhs, target, replacement))
                           for b in x.branches))
    if isinstance(x, (Lam, T.Fix, Forall, T.Exists)):
        return x  # do not rewrite under binders
    if isinstance(x, (T.Impl, T.And, T.Or, T.Iff)):
        return type(x)(_replace_everywhere(x.lhs, target, replacement),
                       _replace_everywhere(x.rhs, target, replacement))
    if isinstance(x, T.Not):
        return T.Not(_replace_everywhere(x.body, target, replacement))
    if isinstance(x, Eq):
        return Eq(x.ty, _replace_everywhere(x.lhs, target, replacement),
                  _replace_everywhere(x.rhs, target, replacement))
    if isinstance(x, T.IsTrue):
        return T.IsTrue(_replace_everywhere(x.arg, target, replacement))
    if isinstance(x, PredApp):
        return PredApp(x.name, x.tyargs,
                       tuple(_replace_everywhere(a, target, replacement)
                             for a in x.args))
    return x


def _branch_cases(env: GlobalEnv, m: Match, scrut_ty):
    """(ctor name, binders with types, constructor pattern, branch rhs)."""
    cases = []
    if m.ind == "bool":
        for b in m.branches:
            pat = BoolLit(b.ctor == "true")
            cases.append((b.ctor, [], pat, b.rhs))
        return cases
    tyargs = scrut_ty.params
    for b in m.branches:
        arg_tys = env.ctor_arg_tys(m.ind, b.ctor, tyargs)
        binders = list(zip(b.binders, arg_tys))
        pat = Ctor(m.ind, b.ctor, tyargs, tuple(Var(n) for n in b.binders))
        cases.append((b.ctor, binders, pat, b.rhs))
    return cases


def _eliminate_one(env: GlobalEnv, goal: Goal, h: Hyp):
    prefix, body = forall_split(h.body)
    m = _find_match(body)
    if m is None:
        return None
    ctx: dict = {n: t for n, t in prefix}
    for vh in goal.var_hyps():
        ctx.setdefault(vh.name, vh.body)
    scrut_ty = BOOL if m.ind == "bool" else typecheck(env, ctx, m.scrutinee)
    out = []
    prefix_names = [n for n, _ in prefix]
    for ctor, binders, pat, rhs in _branch_cases(env, m, scrut_ty):
        # rename the branch binders away from everything already in scope
        avoid = set(prefix_names) | set(ctx) | T.free_vars(body)
        ren: dict[str, T.Term] = {}
        fresh_binders = []
        for n, bty in binders:
            n2 = n if n not in avoid else fresh(n, avoid)
            avoid.add(n2)
            if n2 != n:
                ren[n] = Var(n2)
            fresh_binders.append((n2, bty))
        pat2 = subst_parallel(pat, ren) if ren else pat
        rhs2 = subst_parallel(rhs, ren) if ren else rhs
        body2 = _replace_everywhere(body, m, rhs2)
        if isinstance(m.scrutinee, Var) and m.scrutinee.name in prefix_names:
            v = m.scrutinee.name
            body3 = T.substitute(body2, v, pat2)
            new_prefix = []
            for n, t in prefix:
                if n == v:
                    new_prefix.extend(fresh_binders)
                else:
                    new_prefix.append((n, t))
            out.append((f"{h.name}_{ctor}",
                        forall_chain(new_prefix, body3)))
        else:
            eq = mk_eq(scrut_ty, m.scrutinee, pat2)
            out.append((f"{h.name}_{ctor}",
                        forall_chain(prefix + fresh_binders,
                                     T.Impl(eq, body2))))
    return out


def eliminate_pattern_matching(env: GlobalEnv, goal: Goal,
                               max_passes: int = 100) -> Goal:
    """Replace each hypothesis containing pattern matching by one
    conditional equation per branch, repeatedly, until no reachable match
    remains.  The conclusion is left untouched."""
    for _ in range(max_passes):
        changed = False
        hyps: list[Hyp] = []
        names = _hyp_names(goal)
        for h in goal.hyps:
            if h.is_var:
                hyps.append(h)
                continue
            res = _eliminate_one(env, goal, h)
            if res is None:
                hyps.append(h)
                continue
            changed = True
            names.discard(h.name)
            for base, f in res:
                name = fresh(base, names)
                names.add(name)
                hyps.append(Hyp(name, f))
        goal = Goal(tuple(hyps), goal.concl)
        if not changed:
            break
    return goal
