"""Core syntax: types, terms, formulas, declarations, goals.

Everything here is an immutable tree (frozen dataclasses).  The global
environment is the one mutable object: it is append-only, so transformations
may register new definitions (projection functions) without invalidating
anything already built.

The language is a small higher-order core with prenex polymorphism only:
type variables are bound by `forall (A : Type)` / `fun (A : Type)` prefixes
or by the type scheme of a global constant, never nested inside types.
"""
from __future__ import annotations

from dataclasses import dataclass, field


class SnipeError(Exception):
    pass


class DuplicateDeclaration(SnipeError):
    pass


class ScopeError(SnipeError):
    pass


# ---------------------------------------------------------------------------
# Types


class TypeSort:
    """The sort `Type`, used as a binder annotation for type variables."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "Type"


TYPE = TypeSort()


@dataclass(frozen=True)
class TypeVar:
    name: str


@dataclass(frozen=True)
class BaseTy:
    """An uninterpreted base sort, declared with `Parameter X : Type.`"""

    name: str


@dataclass(frozen=True)
class IntTy:
    pass


@dataclass(frozen=True)
class BoolTy:
    pass


@dataclass(frozen=True)
class PropTy:
    pass


@dataclass(frozen=True)
class Arrow:
    dom: Ty
    cod: Ty


@dataclass(frozen=True)
class IndTy:
    name: str
    params: tuple[Ty, ...] = ()


Ty = "TypeVar | BaseTy | IntTy | BoolTy | PropTy | Arrow | IndTy"

INT = IntTy()
BOOL = BoolTy()
PROP = PropTy()


@dataclass(frozen=True)
class Scheme:
    """Prenex-polymorphic signature: forall vars, body."""

    vars: tuple[str, ...]
    body: Ty

    @property
    def is_mono(self) -> bool:
        return not self.vars


def mono(ty: Ty) -> Scheme:
    return Scheme((), ty)


def arrow(*tys: Ty) -> Ty:
    """arrow(a, b, c) == a -> b -> c"""
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = Arrow(t, out)
    return out


def arrow_split(ty: Ty) -> tuple[list[Ty], Ty]:
    """Decompose a1 -> ... -> an -> cod into ([a1..an], cod)."""
    args: list[Ty] = []
    while isinstance(ty, Arrow):
        args.append(ty.dom)
        ty = ty.cod
    return args, ty


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    """Reference to a global definition/parameter, with its type instance."""

    name: str
    tyargs: tuple[Ty, ...] = ()


@dataclass(frozen=True)
class Ctor:
    """Fully applied constructor of an inductive type."""

    ind: str
    name: str
    tyargs: tuple[Ty, ...]
    args: tuple[Term, ...]


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lam:
    var: str
    ann: "Ty | TypeSort"
    body: "Term | Formula"


@dataclass(frozen=True)
class Branch:
    ctor: str
    binders: tuple[str, ...]
    rhs: Term


@dataclass(frozen=True)
class Match:
    """Pattern match; branches cover every constructor exactly once, in
    declaration order.  `ind` is "bool" for if/then/else."""

    scrutinee: Term
    ind: str
    branches: tuple[Branch, ...]


@dataclass(frozen=True)
class Fix:
    """Anonymous fixpoint; `name` is bound in `body` with type `ann`."""

    name: str
    ann: "Ty | Scheme"
    body: Term


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


Term = "Var | Const | Ctor | App | Lam | Match | Fix | IntLit | BoolLit"


def spine(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def mk_app(head: Term, args) -> Term:
    for a in args:
        head = App(head, a)
    return head


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Forall:
    var: str
    ann: "Ty | TypeSort"
    body: Formula


@dataclass(frozen=True)
class Exists:
    var: str
    ann: Ty
    body: Formula


@dataclass(frozen=True)
class Impl:
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class And:
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Or:
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Iff:
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class Eq:
    """Typed equality.  `ty` may be a Scheme for equations between
    polymorphic constants and their (type-lambda) definitions."""

    ty: "Ty | Scheme"
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class PredApp:
    """Applied predicate: an inductive relation, a Prop-valued definition,
    a Prop-typed local variable, or a built-in relation (Z.le, Z.lt)."""

    name: str
    tyargs: tuple[Ty, ...]
    args: tuple[Term, ...]


@dataclass(frozen=True)
class IsTrue:
    """Coercion of a boolean term into Prop; prints as `b = true`."""

    arg: Term


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


Formula = (
    "Forall | Exists | Impl | And | Or | Iff | Not | Eq | PredApp | IsTrue"
    " | TrueF | FalseF"
)

TRUE = TrueF()
FALSE = FalseF()


def mk_eq(ty: "Ty | Scheme", lhs: Term, rhs: Term) -> Formula:
    if ty == BOOL and rhs == BoolLit(True):
        return IsTrue(lhs)
    return Eq(ty, lhs, rhs)


def conj(fs: list[Formula]) -> Formula:
    if not fs:
        return TRUE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(fs: list[Formula]) -> Formula:
    if not fs:
        return FALSE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def impl_chain(premises: list[Formula], concl: Formula) -> Formula:
    out = concl
    for p in reversed(premises):
        out = Impl(p, out)
    return out


def forall_chain(binders: list[tuple[str, "Ty | TypeSort"]], body: Formula) -> Formula:
    for v, t in reversed(binders):
        body = Forall(v, t, body)
    return body


def exists_chain(binders: list[tuple[str, Ty]], body: Formula) -> Formula:
    for v, t in reversed(binders):
        body = Exists(v, t, body)
    return body


def forall_split(f: Formula) -> tuple[list[tuple[str, "Ty | TypeSort"]], Formula]:
    binders = []
    while isinstance(f, Forall):
        binders.append((f.var, f.ann))
        f = f.body
    return binders, f


# ---------------------------------------------------------------------------
# Declarations, goals, environment


@dataclass(frozen=True)
class CtorDecl:
    """Constructor declaration.

    For ADTs only `binders` is populated.  For inductive relations,
    `premises` are the Prop antecedents and `indices` the arguments of the
    relation in the conclusion."""

    name: str
    binders: tuple[tuple[str, Ty], ...] = ()
    premises: tuple[Formula, ...] = ()
    indices: tuple[Term, ...] = ()


@dataclass(frozen=True)
class InductiveDecl:
    name: str
    params: tuple[str, ...] = ()
    index_tys: tuple[Ty, ...] = ()
    is_prop: bool = False
    ctors: tuple[CtorDecl, ...] = ()

    @property
    def is_adt(self) -> bool:
        return not self.is_prop

    def ctor(self, name: str) -> CtorDecl:
        for c in self.ctors:
            if c.name == name:
                return c
        raise KeyError(name)

    def ctor_index(self, name: str) -> int:
        for i, c in enumerate(self.ctors):
            if c.name == name:
                return i + 1
        raise KeyError(name)


@dataclass(frozen=True)
class DefEntry:
    name: str
    scheme: Scheme
    body: "Term | Formula | None"  # None for Parameter declarations


@dataclass(frozen=True)
class Hyp:
    """Named context entry: either a typed variable (`body` is a Ty) or a
    hypothesis formula."""

    name: str
    body: "Ty | Formula"

    @property
    def is_var(self) -> bool:
        return not isinstance(self.body, _FORMULA_CLASSES)


@dataclass(frozen=True)
class Goal:
    hyps: tuple[Hyp, ...]
    concl: Formula

    def hyp(self, name: str) -> Hyp:
        for h in self.hyps:
            if h.name == name:
                return h
        raise KeyError(name)

    def var_hyps(self) -> list[Hyp]:
        return [h for h in self.hyps if h.is_var]


_FORMULA_CLASSES = (Forall, Exists, Impl, And, Or, Iff, Not, Eq, PredApp,
                    IsTrue, TrueF, FalseF)
_TERM_CLASSES = (Var, Const, Ctor, App, Lam, Match, Fix, IntLit, BoolLit)


def is_formula(x) -> bool:
    return isinstance(x, _FORMULA_CLASSES)


def is_term(x) -> bool:
    return isinstance(x, _TERM_CLASSES)


# Built-in vocabulary.  Dotted names cannot collide with user identifiers
# that matter (users may write dotted names, but these are reserved by the
# base environment).  Values are type schemes.
BUILTIN_CONSTS: dict[str, Scheme] = {
    "Z.add": mono(arrow(INT, INT, INT)),
    "Z.sub": mono(arrow(INT, INT, INT)),
    "Z.mul": mono(arrow(INT, INT, INT)),
    "Z.eqb": mono(arrow(INT, INT, BOOL)),
    "Z.leb": mono(arrow(INT, INT, BOOL)),
    "Z.ltb": mono(arrow(INT, INT, BOOL)),
    "Bool.andb": mono(arrow(BOOL, BOOL, BOOL)),
    "Bool.orb": mono(arrow(BOOL, BOOL, BOOL)),
    "Bool.implb": mono(arrow(BOOL, BOOL, BOOL)),
    "Bool.negb": mono(arrow(BOOL, BOOL)),
    "Bool.eqb": mono(arrow(BOOL, BOOL, BOOL)),
}

# Built-in Prop-valued relations (applied via PredApp).
BUILTIN_RELS: dict[str, tuple[Ty, ...]] = {
    "Z.le": (INT, INT),
    "Z.lt": (INT, INT),
}


class GlobalEnv:
    """Declared inductives, definitions, parameters, sorts and lemmas.

    Append-only: declaring a name twice raises DuplicateDeclaration.
    """

    def __init__(self) -> None:
        self.inductives: dict[str, InductiveDecl] = {}
        self.defs: dict[str, DefEntry] = {}
        self.base_sorts: list[str] = []
        self.lemmas: dict[str, Formula] = {}
        self.opaque: set[str] = set()
        self._ctors: dict[str, tuple[str, int]] = {}  # ctor name -> (ind, 1-based ix)

    # -- declaration ------------------------------------------------------

    def _check_free(self, name: str) -> None:
        if (name in self.inductives or name in self.defs or name in self._ctors
                or name in self.base_sorts or name in BUILTIN_CONSTS
                or name in BUILTIN_RELS or name in ("bool", "Z", "Prop", "Type")):
            raise DuplicateDeclaration(f"name already declared: {name}")

    def declare_inductive(self, decl: InductiveDecl) -> None:
        self._check_free(decl.name)
        for c in decl.ctors:
            self._check_free(c.name)
        self.inductives[decl.name] = decl
        for i, c in enumerate(decl.ctors):
            self._ctors[c.name] = (decl.name, i + 1)

    def declare_def(self, entry: DefEntry, opaque: bool = False) -> None:
        self._check_free(entry.name)
        self.defs[entry.name] = entry
        if opaque or entry.body is None:
            self.opaque.add(entry.name)

    def declare_base_sort(self, name: str) -> None:
        self._check_free(name)
        self.base_sorts.append(name)

    def declare_lemma(self, name: str, f: Formula) -> None:
        if name in self.lemmas:
            raise DuplicateDeclaration(f"lemma already declared: {name}")
        self.lemmas[name] = f

    # -- lookup -----------------------------------------------------------

    def ctor_info(self, name: str) -> "tuple[str, int] | None":
        if name in ("true", "false"):
            return ("bool", 1 if name == "true" else 2)
        return self._ctors.get(name)

    def const_scheme(self, name: str) -> "Scheme | None":
        if name in self.defs:
            return self.defs[name].scheme
        return BUILTIN_CONSTS.get(name)

    def is_relation(self, name: str) -> bool:
        d = self.inductives.get(name)
        return d is not None and d.is_prop

    def ctor_arg_tys(self, ind: str, ctor: str, tyargs: tuple[Ty, ...]) -> list[Ty]:
        decl = self.inductives[ind]
        sub = dict(zip(decl.params, tyargs))
        return [subst_ty(t, sub) for _, t in decl.ctor(ctor).binders]


# ---------------------------------------------------------------------------
# Type substitution and instantiation


def subst_ty(ty: Ty, sub: dict[str, Ty]) -> Ty:
    if isinstance(ty, TypeVar):
        return sub.get(ty.name, ty)
    if isinstance(ty, Arrow):
        return Arrow(subst_ty(ty.dom, sub), subst_ty(ty.cod, sub))
    if isinstance(ty, IndTy):
        return IndTy(ty.name, tuple(subst_ty(p, sub) for p in ty.params))
    return ty


def free_tyvars(ty) -> set[str]:
    if isinstance(ty, TypeVar):
        return {ty.name}
    if isinstance(ty, Arrow):
        return free_tyvars(ty.dom) | free_tyvars(ty.cod)
    if isinstance(ty, IndTy):
        out: set[str] = set()
        for p in ty.params:
            out |= free_tyvars(p)
        return out
    return set()


def inst_ty_sub(x, sub: dict[str, Ty]):
    """Apply a type-variable substitution throughout a term or formula."""
    if not sub:
        return x
    rec = lambda y: inst_ty_sub(y, sub)

    if isinstance(x, (TypeVar, BaseTy, IntTy, BoolTy, PropTy, Arrow, IndTy)):
        return subst_ty(x, sub)
    if isinstance(x, TypeSort):
        return x
    if isinstance(x, Scheme):
        inner = {k: v for k, v in sub.items() if k not in x.vars}
        return Scheme(x.vars, subst_ty(x.body, inner))
    if isinstance(x, (Var, IntLit, BoolLit)):
        return x
    if isinstance(x, Const):
        return Const(x.name, tuple(subst_ty(t, sub) for t in x.tyargs))
    if isinstance(x, Ctor):
        return Ctor(x.ind, x.name, tuple(subst_ty(t, sub) for t in x.tyargs),
                    tuple(rec(a) for a in x.args))
    if isinstance(x, App):
        return App(rec(x.fn), rec(x.arg))
    if isinstance(x, Lam):
        if isinstance(x.ann, TypeSort) and x.var in sub:
            sub = {k: v for k, v in sub.items() if k != x.var}
            return inst_ty_sub(Lam(x.var, x.ann, x.body), sub) if sub else x
        return Lam(x.var, rec(x.ann), rec(x.body))
    if isinstance(x, Match):
        return Match(rec(x.scrutinee), x.ind,
                     tuple(Branch(b.ctor, b.binders, rec(b.rhs)) for b in x.branches))
    if isinstance(x, Fix):
        return Fix(x.name, rec(x.ann), rec(x.body))
    if isinstance(x, Forall):
        if isinstance(x.ann, TypeSort) and x.var in sub:
            sub = {k: v for k, v in sub.items() if k != x.var}
            return inst_ty_sub(Forall(x.var, x.ann, x.body), sub) if sub else x
        return Forall(x.var, rec(x.ann), rec(x.body))
    if isinstance(x, Exists):
        return Exists(x.var, rec(x.ann), rec(x.body))
    if isinstance(x, (Impl, And, Or, Iff)):
        return type(x)(rec(x.lhs), rec(x.rhs))
    if isinstance(x, Not):
        return Not(rec(x.body))
    if isinstance(x, Eq):
        return Eq(rec(x.ty), rec(x.lhs), rec(x.rhs))
    if isinstance(x, PredApp):
        return PredApp(x.name, tuple(subst_ty(t, sub) for t in x.tyargs),
                       tuple(rec(a) for a in x.args))
    if isinstance(x, IsTrue):
        return IsTrue(rec(x.arg))
    if isinstance(x, (TrueF, FalseF)):
        return x
    raise TypeError(f"inst_ty_sub: {x!r}")


# ---------------------------------------------------------------------------
# Free variables and substitution (term level, capture avoiding)


def free_vars(x) -> set[str]:
    if isinstance(x, Var):
        return {x.name}
    if isinstance(x, (Const, IntLit, BoolLit, TrueF, FalseF)):
        return set()
    if isinstance(x, Ctor):
        out: set[str] = set()
        for a in x.args:
            out |= free_vars(a)
        return out
    if isinstance(x, App):
        return free_vars(x.fn) | free_vars(x.arg)
    if isinstance(x, Lam):
        return free_vars(x.body) - {x.var}
    if isinstance(x, Match):
        out = free_vars(x.scrutinee)
        for b in x.branches:
            out |= free_vars(b.rhs) - set(b.binders)
        return out
    if isinstance(x, Fix):
        return free_vars(x.body) - {x.name}
    if isinstance(x, (Forall, Exists)):
        return free_vars(x.body) - {x.var}
    if isinstance(x, (Impl, And, Or, Iff)):
        return free_vars(x.lhs) | free_vars(x.rhs)
    if isinstance(x, Not):
        return free_vars(x.body)
    if isinstance(x, Eq):
        return free_vars(x.lhs) | free_vars(x.rhs)
    if isinstance(x, PredApp):
        out = {x.name}  # may be a bound variable; harmless if global
        for a in x.args:
            out |= free_vars(a)
        return out
    if isinstance(x, IsTrue):
        return free_vars(x.arg)
    raise TypeError(f"free_vars: {x!r}")


def fresh(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    i = 0
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def substitute(x, name: str, value: Term):
    """Capture-avoiding substitution of `value` for the free variable `name`."""
    return subst_parallel(x, {name: value})


def subst_parallel(x, sub: dict[str, Term]):
    if not sub:
        return x
    fvs: set[str] = set()
    for v in sub.values():
        fvs |= free_vars(v)
    return _subst(x, sub, fvs)


def _under_binder(binders: list[str], sub: dict[str, Term], fvs: set[str], body):
    """Returns (renamed binders, body adjusted for renaming, filtered sub)."""
    sub = {k: v for k, v in sub.items() if k not in binders}
    if not sub:
        return binders, body, sub, fvs
    renames: dict[str, Term] = {}
    new_binders = list(binders)
    avoid = fvs | free_vars(body) | set(sub.keys())
    for i, b in enumerate(binders):
        if b in fvs:
            nb = fresh(b, avoid)
            avoid.add(nb)
            renames[b] = Var(nb)
            new_binders[i] = nb
    if renames:
        body = subst_parallel(body, renames)
    return new_binders, body, sub, fvs


def _subst(x, sub: dict[str, Term], fvs: set[str]):
    if not sub:
        return x
    rec = lambda y: _subst(y, sub, fvs)

    if isinstance(x, Var):
        return sub.get(x.name, x)
    if isinstance(x, (Const, IntLit, BoolLit, TrueF, FalseF)):
        return x
    if isinstance(x, Ctor):
        return Ctor(x.ind, x.name, x.tyargs, tuple(rec(a) for a in x.args))
    if isinstance(x, App):
        return App(rec(x.fn), rec(x.arg))
    if isinstance(x, Lam):
        (v,), body, sub2, _ = _under_binder([x.var], sub, fvs, x.body)
        return Lam(v, x.ann, _subst(body, sub2, fvs))
    if isinstance(x, Match):
        scrut = rec(x.scrutinee)
        brs = []
        for b in x.branches:
            bs, rhs, sub2, _ = _under_binder(list(b.binders), sub, fvs, b.rhs)
            brs.append(Branch(b.ctor, tuple(bs), _subst(rhs, sub2, fvs)))
        return Match(scrut, x.ind, tuple(brs))
    if isinstance(x, Fix):
        (v,), body, sub2, _ = _under_binder([x.name], sub, fvs, x.body)
        return Fix(v, x.ann, _subst(body, sub2, fvs))
    if isinstance(x, (Forall, Exists)):
        (v,), body, sub2, _ = _under_binder([x.var], sub, fvs, x.body)
        return type(x)(v, x.ann, _subst(body, sub2, fvs))
    if isinstance(x, (Impl, And, Or, Iff)):
        return type(x)(rec(x.lhs), rec(x.rhs))
    if isinstance(x, Not):
        return Not(rec(x.body))
    if isinstance(x, Eq):
        return Eq(x.ty, rec(x.lhs), rec(x.rhs))
    if isinstance(x, PredApp):
        args = tuple(rec(a) for a in x.args)
        if x.name in sub:
            # The predicate head itself is substituted: rebuild as a term
            # application if the replacement is not a bare variable/constant.
            head = sub[x.name]
            if isinstance(head, Var):
                return PredApp(head.name, x.tyargs, args)
            if isinstance(head, Const) and not x.tyargs:
                return PredApp(head.name, head.tyargs, args)
            raise ScopeError(f"cannot substitute predicate head {x.name}")
        return PredApp(x.name, x.tyargs, args)
    if isinstance(x, IsTrue):
        return IsTrue(rec(x.arg))
    raise TypeError(f"substitute: {x!r}")


# ---------------------------------------------------------------------------
# Alpha equivalence


def alpha_eq(a, b) -> bool:
    return _aeq(a, b, {}, {}, 0)


def _aeq_ty(a, b, env1, env2) -> bool:
    if isinstance(a, TypeVar) or isinstance(b, TypeVar):
        if not (isinstance(a, TypeVar) and isinstance(b, TypeVar)):
            return False
        return env1.get(("T", a.name), a.name) == env2.get(("T", b.name), b.name)
    if type(a) is not type(b):
        return False
    if isinstance(a, (IntTy, BoolTy, PropTy, TypeSort)):
        return True
    if isinstance(a, BaseTy):
        return a.name == b.name
    if isinstance(a, Arrow):
        return _aeq_ty(a.dom, b.dom, env1, env2) and _aeq_ty(a.cod, b.cod, env1, env2)
    if isinstance(a, IndTy):
        return (a.name == b.name and len(a.params) == len(b.params)
                and all(_aeq_ty(x, y, env1, env2) for x, y in zip(a.params, b.params)))
    if isinstance(a, Scheme):
        if len(a.vars) != len(b.vars):
            return False
        e1, e2 = dict(env1), dict(env2)
        for i, (v1, v2) in enumerate(zip(a.vars, b.vars)):
            e1[("T", v1)] = ("S", i)
            e2[("T", v2)] = ("S", i)
        return _aeq_ty(a.body, b.body, e1, e2)
    return False


def _bind(env, key, depth):
    env = dict(env)
    env[key] = depth
    return env


def _aeq(a, b, env1, env2, depth) -> bool:
    if type(a) is not type(b):
        return False

    # types / annotations
    if isinstance(a, (TypeVar, BaseTy, IntTy, BoolTy, PropTy, Arrow, IndTy,
                      Scheme, TypeSort)):
        return _aeq_ty(a, b, env1, env2)

    if isinstance(a, Var):
        return env1.get(a.name, ("free", a.name)) == env2.get(b.name, ("free", b.name))
    if isinstance(a, Const):
        return (a.name == b.name and len(a.tyargs) == len(b.tyargs)
                and all(_aeq_ty(x, y, env1, env2) for x, y in zip(a.tyargs, b.tyargs)))
    if isinstance(a, (IntLit, BoolLit)):
        return a.value == b.value
    if isinstance(a, (TrueF, FalseF)):
        return True
    if isinstance(a, Ctor):
        return (a.ind == b.ind and a.name == b.name
                and len(a.tyargs) == len(b.tyargs) and len(a.args) == len(b.args)
                and all(_aeq_ty(x, y, env1, env2) for x, y in zip(a.tyargs, b.tyargs))
                and all(_aeq(x, y, env1, env2, depth) for x, y in zip(a.args, b.args)))
    if isinstance(a, App):
        return _aeq(a.fn, b.fn, env1, env2, depth) and _aeq(a.arg, b.arg, env1, env2, depth)
    if isinstance(a, Lam):
        if not _aeq(a.ann, b.ann, env1, env2, depth):
            return False
        if isinstance(a.ann, TypeSort):
            return _aeq(a.body, b.body, _bind(env1, ("T", a.var), depth),
                        _bind(env2, ("T", b.var), depth), depth + 1)
        return _aeq(a.body, b.body, _bind(env1, a.var, depth),
                    _bind(env2, b.var, depth), depth + 1)
    if isinstance(a, Match):
        if a.ind != b.ind or len(a.branches) != len(b.branches):
            return False
        if not _aeq(a.scrutinee, b.scrutinee, env1, env2, depth):
            return False
        for x, y in zip(a.branches, b.branches):
            if x.ctor != y.ctor or len(x.binders) != len(y.binders):
                return False
            e1, e2, d = env1, env2, depth
            for v1, v2 in zip(x.binders, y.binders):
                e1 = _bind(e1, v1, d)
                e2 = _bind(e2, v2, d)
                d += 1
            if not _aeq(x.rhs, y.rhs, e1, e2, d):
                return False
        return True
    if isinstance(a, Fix):
        if not _aeq(a.ann, b.ann, env1, env2, depth):
            return False
        return _aeq(a.body, b.body, _bind(env1, a.name, depth),
                    _bind(env2, b.name, depth), depth + 1)
    if isinstance(a, Forall):
        if not _aeq(a.ann, b.ann, env1, env2, depth):
            return False
        if isinstance(a.ann, TypeSort):
            return _aeq(a.body, b.body, _bind(env1, ("T", a.var), depth),
                        _bind(env2, ("T", b.var), depth), depth + 1)
        return _aeq(a.body, b.body, _bind(env1, a.var, depth),
                    _bind(env2, b.var, depth), depth + 1)
    if isinstance(a, Exists):
        if not _aeq(a.ann, b.ann, env1, env2, depth):
            return False
        return _aeq(a.body, b.body, _bind(env1, a.var, depth),
                    _bind(env2, b.var, depth), depth + 1)
    if isinstance(a, (Impl, And, Or, Iff)):
        return _aeq(a.lhs, b.lhs, env1, env2, depth) and _aeq(a.rhs, b.rhs, env1, env2, depth)
    if isinstance(a, Not):
        return _aeq(a.body, b.body, env1, env2, depth)
    if isinstance(a, Eq):
        return (_aeq(a.ty, b.ty, env1, env2, depth)
                and _aeq(a.lhs, b.lhs, env1, env2, depth)
                and _aeq(a.rhs, b.rhs, env1, env2, depth))
    if isinstance(a, PredApp):
        n1 = env1.get(a.name, ("free", a.name))
        n2 = env2.get(b.name, ("free", b.name))
        return (n1 == n2 and len(a.args) == len(b.args)
                and len(a.tyargs) == len(b.tyargs)
                and all(_aeq_ty(x, y, env1, env2) for x, y in zip(a.tyargs, b.tyargs))
                and all(_aeq(x, y, env1, env2, depth) for x, y in zip(a.args, b.args)))
    if isinstance(a, IsTrue):
        return _aeq(a.arg, b.arg, env1, env2, depth)
    raise TypeError(f"alpha_eq: {a!r}")


def goal_alpha_eq(a: Goal, b: Goal) -> bool:
    """Goals compare hypothesis-by-hypothesis (same order, same names for
    variables since they are free in later entries)."""
    if len(a.hyps) != len(b.hyps):
        return False
    for h1, h2 in zip(a.hyps, b.hyps):
        if h1.is_var != h2.is_var:
            return False
        if h1.is_var and h1.name != h2.name:
            return False
        if not alpha_eq(h1.body, h2.body):
            return False
    return alpha_eq(a.concl, b.concl)
