"""Pretty printer for types, terms, formulas, goals and declarations.

Output is deterministic, single-line per formula, and re-parseable: for any
well-formed `x`, parsing `print(x)` yields an alpha-equivalent tree.

Precedence climbs from binders (loosest) to atoms; a node is parenthesized
when its own precedence is below what its context requires.
"""
from __future__ import annotations

from . import terms as T

PREC_BINDER = 0
PREC_IMPL = 1
PREC_IFF = 2
PREC_OR = 3
PREC_AND = 4
PREC_NOT = 5
PREC_CMP = 6
PREC_ORB = 7
PREC_ANDB = 8
PREC_ADD = 9
PREC_MUL = 10
PREC_APP = 11
PREC_ATOM = 12

# builtin constant -> (symbol, precedence) for infix rendering
INFIX_CONSTS = {
    "Z.add": ("+", PREC_ADD),
    "Z.sub": ("-", PREC_ADD),
    "Z.mul": ("*", PREC_MUL),
    "Z.eqb": ("=?", PREC_CMP),
    "Z.leb": ("<=?", PREC_CMP),
    "Z.ltb": ("<?", PREC_CMP),
    "Bool.andb": ("&&", PREC_ANDB),
    "Bool.orb": ("||", PREC_ORB),
}

INFIX_RELS = {"Z.le": "<=", "Z.lt": "<"}


def _wrap(s: str, own: int, req: int) -> str:
    return f"({s})" if own < req else s


def print_ty(ty, req: int = PREC_BINDER) -> str:
    if isinstance(ty, T.TypeVar):
        return ty.name
    if isinstance(ty, T.BaseTy):
        return ty.name
    if isinstance(ty, T.IntTy):
        return "Z"
    if isinstance(ty, T.BoolTy):
        return "bool"
    if isinstance(ty, T.PropTy):
        return "Prop"
    if isinstance(ty, T.TypeSort):
        return "Type"
    if isinstance(ty, T.Arrow):
        s = f"{print_ty(ty.dom, PREC_IFF)} -> {print_ty(ty.cod, PREC_IMPL)}"
        return _wrap(s, PREC_IMPL, req)
    if isinstance(ty, T.IndTy):
        if not ty.params:
            return ty.name
        s = ty.name + "".join(f" {print_ty(p, PREC_ATOM)}" for p in ty.params)
        return _wrap(s, PREC_APP, req)
    if isinstance(ty, T.Scheme):
        if not ty.vars:
            return print_ty(ty.body, req)
        binders = " ".join(f"({v} : Type)" for v in ty.vars)
        return _wrap(f"forall {binders}, {print_ty(ty.body)}", PREC_BINDER, req)
    raise TypeError(f"print_ty: {ty!r}")


def _group_binders(binders: list[tuple[str, object]]) -> str:
    """Render `(x y : T) (z : U)`, grouping adjacent binders of equal type."""
    groups: list[tuple[list[str], object]] = []
    for v, ann in binders:
        if groups and groups[-1][1] == ann:
            groups[-1][0].append(v)
        else:
            groups.append(([v], ann))
    parts = []
    for names, ann in groups:
        ann_s = "Type" if isinstance(ann, T.TypeSort) else print_ty(ann)
        parts.append(f"({' '.join(names)} : {ann_s})")
    return " ".join(parts)


class Printer:
    def __init__(self, env: "T.GlobalEnv | None" = None):
        self.env = env

    # -- implicit type-argument elision ------------------------------------

    def _implicit_after(self, params: tuple[str, ...], arg_tys: list) -> "int | None":
        """Number of value arguments after which all type parameters are
        inferable; None when they never are."""
        if not params:
            return 0
        need = -1
        remaining = set(params)
        for i, at in enumerate(arg_tys):
            hit = remaining & T.free_tyvars(at)
            if hit:
                remaining -= hit
                need = i
            if not remaining:
                return need + 1
        return None

    def _const_head(self, c: T.Const, nargs: int) -> "str | None":
        """Rendered head if tyargs can be elided given `nargs` applied args."""
        if not c.tyargs:
            return c.name
        if self.env is not None:
            sch = self.env.const_scheme(c.name)
            if sch is not None and len(sch.vars) == len(c.tyargs):
                arg_tys, _ = T.arrow_split(sch.body)
                k = self._implicit_after(sch.vars, arg_tys)
                if k is not None and nargs >= k:
                    return c.name
        return None

    def _ctor_head(self, c: T.Ctor) -> "str | None":
        if not c.tyargs:
            return c.name
        if self.env is not None and c.ind in self.env.inductives:
            decl = self.env.inductives[c.ind]
            arg_tys = [t for _, t in decl.ctor(c.name).binders]
            k = self._implicit_after(decl.params, arg_tys)
            if k is not None and len(c.args) >= k:
                return c.name
        return None

    # -- terms --------------------------------------------------------------

    def term(self, t, req: int = PREC_BINDER) -> str:
        if isinstance(t, T.Var):
            return t.name
        if isinstance(t, T.IntLit):
            if t.value < 0:
                return _wrap(str(t.value), PREC_ADD, req)
            return str(t.value)
        if isinstance(t, T.BoolLit):
            return "true" if t.value else "false"
        if isinstance(t, T.Const):
            head = self._const_head(t, 0)
            if head is not None:
                return head
            s = f"@{t.name}" + "".join(f" {print_ty(a, PREC_ATOM)}" for a in t.tyargs)
            return _wrap(s, PREC_APP, req)
        if isinstance(t, T.Ctor):
            head = self._ctor_head(t)
            if head is None:
                s = f"@{t.name}" + "".join(f" {print_ty(a, PREC_ATOM)}" for a in t.tyargs)
            else:
                s = head
            if t.args:
                s += "".join(f" {self.term(a, PREC_ATOM)}" for a in t.args)
            if t.args or head is None and t.tyargs:
                return _wrap(s, PREC_APP, req)
            return s
        if isinstance(t, T.App):
            head, args = T.spine(t)
            if isinstance(head, T.Const) and head.name in INFIX_CONSTS and len(args) == 2:
                sym, prec = INFIX_CONSTS[head.name]
                if prec == PREC_CMP:
                    s = f"{self.term(args[0], PREC_ORB)} {sym} {self.term(args[1], PREC_ORB)}"
                else:
                    s = f"{self.term(args[0], prec)} {sym} {self.term(args[1], prec + 1)}"
                return _wrap(s, prec, req)
            if isinstance(head, T.Const):
                h = self._const_head(head, len(args))
                hs = h if h is not None else self.term(head, PREC_ATOM)
            else:
                hs = self.term(head, PREC_ATOM)
            s = hs + "".join(f" {self.term(a, PREC_ATOM)}" for a in args)
            return _wrap(s, PREC_APP, req)
        if isinstance(t, T.Lam):
            binders, body = self._lam_binders(t)
            s = f"fun {_group_binders(binders)} => {self.any(body)}"
            return _wrap(s, PREC_BINDER, req)
        if isinstance(t, T.Match):
            if t.ind == "bool":
                tb = next(b.rhs for b in t.branches if b.ctor == "true")
                fb = next(b.rhs for b in t.branches if b.ctor == "false")
                s = (f"if {self.term(t.scrutinee)} then {self.term(tb)}"
                     f" else {self.term(fb)}")
                return _wrap(s, PREC_BINDER, req)
            brs = []
            for b in t.branches:
                pat = b.ctor + "".join(f" {v}" for v in b.binders)
                brs.append(f"| {pat} => {self.term(b.rhs)}")
            return f"match {self.term(t.scrutinee)} with {' '.join(brs)} end"
        if isinstance(t, T.Fix):
            ann = print_ty(t.ann) if not isinstance(t.ann, T.Scheme) else print_ty(t.ann)
            s = f"fix {t.name} : {ann} := {self.term(t.body)}"
            return _wrap(s, PREC_BINDER, req)
        raise TypeError(f"print term: {t!r}")

    def _lam_binders(self, t: T.Lam):
        binders = []
        while isinstance(t, T.Lam):
            binders.append((t.var, t.ann))
            t = t.body
        return binders, t

    # -- formulas -------------------------------------------------------------

    def formula(self, f, req: int = PREC_BINDER) -> str:
        if isinstance(f, T.Forall):
            binders = []
            while isinstance(f, T.Forall):
                binders.append((f.var, f.ann))
                f = f.body
            s = f"forall {_group_binders(binders)}, {self.formula(f)}"
            return _wrap(s, PREC_BINDER, req)
        if isinstance(f, T.Exists):
            binders = []
            while isinstance(f, T.Exists):
                binders.append((f.var, f.ann))
                f = f.body
            s = f"exists {_group_binders(binders)}, {self.formula(f)}"
            return _wrap(s, PREC_BINDER, req)
        if isinstance(f, T.Impl):
            s = f"{self.formula(f.lhs, PREC_IFF)} -> {self.formula(f.rhs, PREC_IMPL)}"
            return _wrap(s, PREC_IMPL, req)
        if isinstance(f, T.Iff):
            s = f"{self.formula(f.lhs, PREC_OR)} <-> {self.formula(f.rhs, PREC_OR)}"
            return _wrap(s, PREC_IFF, req)
        if isinstance(f, T.Or):
            s = f"{self.formula(f.lhs, PREC_AND)} \\/ {self.formula(f.rhs, PREC_OR)}"
            return _wrap(s, PREC_OR, req)
        if isinstance(f, T.And):
            s = f"{self.formula(f.lhs, PREC_NOT)} /\\ {self.formula(f.rhs, PREC_AND)}"
            return _wrap(s, PREC_AND, req)
        if isinstance(f, T.Not):
            if isinstance(f.body, T.Eq):
                e = f.body
                s = f"{self.term(e.lhs, PREC_ORB)} <> {self.term(e.rhs, PREC_ORB)}"
                return _wrap(s, PREC_CMP, req)
            s = f"~ {self.formula(f.body, PREC_NOT)}"
            return _wrap(s, PREC_NOT, req)
        if isinstance(f, T.Eq):
            s = f"{self.term(f.lhs, PREC_ORB)} = {self.term(f.rhs, PREC_ORB)}"
            return _wrap(s, PREC_CMP, req)
        if isinstance(f, T.IsTrue):
            s = f"{self.term(f.arg, PREC_ORB)} = true"
            return _wrap(s, PREC_CMP, req)
        if isinstance(f, T.PredApp):
            if f.name in INFIX_RELS and len(f.args) == 2:
                sym = INFIX_RELS[f.name]
                s = f"{self.term(f.args[0], PREC_ORB)} {sym} {self.term(f.args[1], PREC_ORB)}"
                return _wrap(s, PREC_CMP, req)
            s = f.name
            if f.tyargs:
                s = f"@{f.name}" + "".join(f" {print_ty(a, PREC_ATOM)}" for a in f.tyargs)
            s += "".join(f" {self.term(a, PREC_ATOM)}" for a in f.args)
            return _wrap(s, PREC_APP, req) if (f.args or f.tyargs) else s
        if isinstance(f, T.TrueF):
            return "True"
        if isinstance(f, T.FalseF):
            return "False"
        raise TypeError(f"print formula: {f!r}")

    def any(self, x, req: int = PREC_BINDER) -> str:
        return self.formula(x, req) if T.is_formula(x) else self.term(x, req)


def print_term(t, env=None, req: int = PREC_BINDER) -> str:
    return Printer(env).term(t, req)


def print_formula(f, env=None, req: int = PREC_BINDER) -> str:
    return Printer(env).formula(f, req)


def print_hyp(h: T.Hyp, env=None) -> str:
    if h.is_var:
        return f"Variable {h.name} : {print_ty(h.body)}."
    return f"Hypothesis {h.name} : {print_formula(h.body, env)}."


def print_goal(g: T.Goal, env=None) -> str:
    lines = [print_hyp(h, env) for h in g.hyps]
    lines.append(f"Goal {print_formula(g.concl, env)}.")
    return "\n".join(lines)


def print_definition(entry: T.DefEntry, env=None) -> str:
    if entry.body is None:
        sch = entry.scheme
        ty_s = print_ty(sch) if sch.vars else print_ty(sch.body)
        return f"Parameter {entry.name} : {ty_s}."
    return f"Definition {entry.name} := {Printer(env).any(entry.body)}."


def print_inductive(decl: T.InductiveDecl, env=None) -> str:
    pr = Printer(env)
    head = decl.name
    if decl.params:
        head += " " + " ".join(f"({p} : Type)" for p in decl.params)
    if decl.is_prop:
        arity = "".join(f"{print_ty(t, PREC_IFF)} -> " for t in decl.index_tys) + "Prop"
        head += f" : {arity}"
    ctors = []
    for c in decl.ctors:
        if decl.is_adt:
            s = c.name
            if c.binders:
                s += " " + _group_binders(list(c.binders))
            ctors.append(s)
        else:
            body: T.Formula = T.PredApp(decl.name, (), c.indices)
            body = T.impl_chain(list(c.premises), body)
            body = T.forall_chain(list(c.binders), body)
            ctors.append(f"{c.name} : {pr.formula(body)}")
    rhs = " | ".join(ctors)
    return f"Inductive {head} := {rhs}."
