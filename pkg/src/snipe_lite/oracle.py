"""Finite-model oracle: bounded evaluation of terms and formulas.

A FiniteModel fixes finite semantic domains: an integer interval for Z,
depth-bounded constructor trees for inductive types, small explicit domains
for uninterpreted sorts, and capped function spaces for arrow types.
Quantifiers range over these domains under a deterministic assignment
budget, so evaluation is a sound *approximation*: a reported False is a real
counterexample within the domains; True means "no counterexample found".

Inductive-relation atoms are decided by bounded backward derivation search
over the relation's constructors.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import terms as T
from .checker import FuelExhausted, _def_value
from .terms import (
    BOOL, INT, PROP, TYPE, Arrow, BaseTy, BoolLit, Const, Ctor, Eq, Fix,
    Forall, GlobalEnv, IndTy, IntLit, Lam, Match, PredApp, Scheme, TypeVar,
    Var, spine,
)


class EvalError(T.SnipeError):
    pass


class EnumerationError(EvalError):
    pass


@dataclass
class FiniteModel:
    int_range: tuple[int, int] = (-8, 8)
    bound_depth: int = 4
    sort_sizes: dict[str, int] = field(default_factory=dict)  # default size 2
    params: dict[str, object] = field(default_factory=dict)   # name -> int|bool
    enum_cap: int = 300
    budget: int = 2_000
    fuel: int = 5_000_000
    int_field_pool: int = 7   # Z values used inside constructor fields
    fn_dom_cap: int = 6       # domain points per enumerated function
    type_family: "tuple | None" = None  # instantiations for Type quantifiers


def default_model() -> FiniteModel:
    return FiniteModel()


def random_model(seed: int) -> FiniteModel:
    rng = random.Random(seed)
    lo = rng.randint(-8, -2)
    hi = rng.randint(2, 8)
    return FiniteModel(
        int_range=(lo, hi),
        bound_depth=rng.randint(3, 4),
        sort_sizes={},
        enum_cap=200,
        budget=rng.randint(1_000, 3_000),
        int_field_pool=rng.randint(4, 7),
        fn_dom_cap=rng.randint(4, 6),
    )


def parse_model_file(text: str) -> FiniteModel:
    """Line-oriented model description; see docs/grammar.md."""
    m = FiniteModel()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key, args = parts[0], parts[1:]
        try:
            if key == "int-range":
                m.int_range = (int(args[0]), int(args[1]))
            elif key == "bound-depth":
                m.bound_depth = int(args[0])
            elif key == "sort":
                m.sort_sizes[args[0]] = int(args[1])
            elif key == "param":
                v = args[1]
                m.params[args[0]] = (True if v == "true" else
                                     False if v == "false" else int(v))
            elif key == "enum-cap":
                m.enum_cap = int(args[0])
            elif key == "budget":
                m.budget = int(args[0])
            elif key == "fuel":
                m.fuel = int(args[0])
            elif key == "int-field-pool":
                m.int_field_pool = int(args[0])
            elif key == "fn-dom-cap":
                m.fn_dom_cap = int(args[0])
            else:
                raise ValueError(f"unknown key {key!r}")
        except (IndexError, ValueError) as e:
            raise EvalError(f"model file line {lineno}: {e}") from None
    return m


# ---------------------------------------------------------------------------
# Values


@dataclass(frozen=True)
class VCtor:
    ind: str
    name: str
    tyargs: tuple
    args: tuple


@dataclass(frozen=True)
class VAtom:
    sort: str
    index: int


@dataclass(frozen=True)
class VFun:
    """Finite function: ordered (argument, result) table, total over the
    enumerated domain of its type."""

    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "_table", dict(self.items))

    def lookup(self, key):
        try:
            return self._table[key]
        except KeyError:
            raise EvalError("function applied outside its enumerated"
                            " domain") from None


class VClosure:
    __slots__ = ("var", "body", "venv")

    def __init__(self, var, body, venv):
        self.var, self.body, self.venv = var, body, venv


class VFixC:
    __slots__ = ("fix", "venv")

    def __init__(self, fix: Fix, venv):
        self.fix, self.venv = fix, venv


class VBuiltin:
    __slots__ = ("name", "args")

    def __init__(self, name: str, args: tuple = ()):
        self.name, self.args = name, args


class VPyFun:
    """Externally interpreted function (used to give semantics to otherwise
    opaque parameters, e.g. reverse embeddings during claim validation)."""

    __slots__ = ("name", "arity", "fn", "args")

    def __init__(self, name: str, arity: int, fn, args: tuple = ()):
        self.name, self.arity, self.fn, self.args = name, arity, fn, args


_BUILTIN_ARITY = {
    "Z.add": 2, "Z.sub": 2, "Z.mul": 2, "Z.eqb": 2, "Z.leb": 2, "Z.ltb": 2,
    "Bool.andb": 2, "Bool.orb": 2, "Bool.implb": 2, "Bool.eqb": 2,
    "Bool.negb": 1,
}


def _builtin_apply(name: str, args: tuple):
    a = args
    if name == "Z.add":
        return a[0] + a[1]
    if name == "Z.sub":
        return a[0] - a[1]
    if name == "Z.mul":
        return a[0] * a[1]
    if name == "Z.eqb":
        return a[0] == a[1]
    if name == "Z.leb":
        return a[0] <= a[1]
    if name == "Z.ltb":
        return a[0] < a[1]
    if name == "Bool.andb":
        return a[0] and a[1]
    if name == "Bool.orb":
        return a[0] or a[1]
    if name == "Bool.implb":
        return (not a[0]) or a[1]
    if name == "Bool.eqb":
        return a[0] == a[1]
    if name == "Bool.negb":
        return not a[0]
    raise EvalError(f"unknown builtin {name}")


def reify(v) -> T.Term:
    if isinstance(v, bool):
        return BoolLit(v)
    if isinstance(v, int):
        return IntLit(v)
    if isinstance(v, VCtor):
        return Ctor(v.ind, v.name, v.tyargs, tuple(reify(a) for a in v.args))
    raise EvalError(f"value not representable as a closed term: {v!r}")


def _qdepth(f) -> int:
    if isinstance(f, (Forall, T.Exists)):
        return 1 + _qdepth(f.body)
    if isinstance(f, (T.Impl, T.And, T.Or, T.Iff)):
        return max(_qdepth(f.lhs), _qdepth(f.rhs))
    if isinstance(f, T.Not):
        return _qdepth(f.body)
    return 0


class Oracle:
    """Evaluator over a finite model.  Reusable across formulas; caches
    enumeration and constant values."""

    def __init__(self, env: GlobalEnv, model: "FiniteModel | None" = None,
                 interp: "dict | None" = None):
        self.env = env
        self.model = model if model is not None else default_model()
        self.interp = dict(interp or {})  # name -> (arity, python fn)
        self._enum_cache: dict = {}
        self._const_cache: dict = {}
        self._derived: set = set()
        self.fuel = 0

    # -- public API --------------------------------------------------------

    def eval_term(self, t: T.Term, venv: "dict | None" = None) -> T.Term:
        self.fuel = self.model.fuel
        return reify(self._ev(t, dict(venv or {})))

    def eval_value(self, t: T.Term, venv: "dict | None" = None):
        """Like eval_term, but returns the raw semantic value unreified."""
        self.fuel = self.model.fuel
        return self._ev(t, dict(venv or {}))

    def eval_formula(self, f: T.Formula, venv: "dict | None" = None,
                     budget: "int | None" = None) -> bool:
        self.fuel = self.model.fuel
        return self._evf(f, dict(venv or {}),
                         budget if budget is not None else self.model.budget)

    # -- enumeration --------------------------------------------------------

    def type_family(self) -> list:
        if self.model.type_family is not None:
            return list(self.model.type_family)
        return [BOOL] + [BaseTy(s) for s in self.env.base_sorts]

    def enumerate_ty(self, ty) -> list:
        ty_key = ty
        if ty_key in self._enum_cache:
            return self._enum_cache[ty_key]
        out = self._enumerate(ty)
        self._enum_cache[ty_key] = out
        return out

    def _int_values(self, cap: "int | None" = None) -> list[int]:
        lo, hi = self.model.int_range
        vals = sorted(range(lo, hi + 1), key=lambda v: (abs(v), v < 0))
        return vals[:cap] if cap is not None else vals

    def _enumerate(self, ty) -> list:
        m = self.model
        if isinstance(ty, T.IntTy):
            return self._int_values()
        if isinstance(ty, T.BoolTy):
            return [True, False]
        if isinstance(ty, T.PropTy):
            return [True, False]
        if isinstance(ty, BaseTy):
            n = m.sort_sizes.get(ty.name, 2)
            return [VAtom(ty.name, i) for i in range(n)]
        if isinstance(ty, IndTy):
            return self._enumerate_ind(ty)
        if isinstance(ty, Arrow):
            return self._enumerate_fun(ty)
        if isinstance(ty, TypeVar):
            raise EnumerationError(f"cannot enumerate open type {ty.name}")
        raise EnumerationError(f"cannot enumerate {ty!r}")

    def _field_values(self, ty, depth: int) -> list:
        """Values for a constructor field during inductive enumeration."""
        if isinstance(ty, IndTy):
            return self._ind_upto(ty, depth)
        if isinstance(ty, T.IntTy):
            return self._int_values(self.model.int_field_pool)
        return self.enumerate_ty(ty)

    def _ind_upto(self, ty: IndTy, depth: int) -> list:
        """Values of an inductive type up to a constructor-nesting depth.

        Generated generation by generation, so every strict subterm of an
        emitted value appears earlier in the list; truncation by enum_cap
        therefore never drops a subterm of a kept value."""
        key = (ty, depth)
        if key in self._enum_cache:
            return self._enum_cache[key]
        decl = self.env.inductives.get(ty.name)
        if decl is None or decl.is_prop:
            raise EnumerationError(f"cannot enumerate {ty.name}")
        sub = dict(zip(decl.params, ty.params))
        out: list = []
        seen: set = set()
        cap = self.model.enum_cap
        for d in range(1, depth + 1):
            if len(out) >= cap:
                break
            for c in decl.ctors:
                arg_tys = [T.subst_ty(t, sub) for _, t in c.binders]
                pools = [self._field_values(t, d - 1) for t in arg_tys]
                if any(not p for p in pools):
                    continue
                for combo in itertools.product(*pools):
                    v = VCtor(ty.name, c.name, ty.params, tuple(combo))
                    if v not in seen:
                        seen.add(v)
                        out.append(v)
                    if len(out) >= cap:
                        break
                if len(out) >= cap:
                    break
        self._enum_cache[key] = out
        return out

    def _enumerate_ind(self, ty: IndTy) -> list:
        return self._ind_upto(ty, self.model.bound_depth)

    def _enumerate_fun(self, ty: Arrow) -> list:
        """Function values: total tables over the full enumerated domain.
        Exhaustive when the space is tiny; otherwise constant functions plus
        one-point deviations (deviation points limited to fn_dom_cap)."""
        doms = self.enumerate_ty(ty.dom)
        cods = self.enumerate_ty(ty.cod)[: self.model.fn_dom_cap]
        if not doms or not cods:
            raise EnumerationError("empty function domain")
        for d in doms:
            if isinstance(d, (VClosure, VFixC, VFun, VBuiltin)):
                raise EnumerationError("higher-order function domains are not"
                                       " enumerable")
        out: list = []
        if len(cods) ** len(doms) <= 64:
            for combo in itertools.product(cods, repeat=len(doms)):
                out.append(VFun(tuple(zip(doms, combo))))
            return out
        for c in cods:
            out.append(VFun(tuple((d, c) for d in doms)))
        base = cods[0]
        for i in range(min(len(doms), self.model.fn_dom_cap)):
            for c in cods[1:]:
                items = tuple((d, c if j == i else base)
                              for j, d in enumerate(doms))
                out.append(VFun(items))
        return out

    # -- term evaluation ----------------------------------------------------

    def _burn(self):
        self.fuel -= 1
        if self.fuel <= 0:
            raise FuelExhausted("evaluation fuel exhausted")

    def _ev(self, t, venv):
        self._burn()
        if isinstance(t, Var):
            if t.name not in venv:
                raise EvalError(f"unbound variable {t.name} during evaluation")
            return venv[t.name]
        if isinstance(t, IntLit):
            return t.value
        if isinstance(t, BoolLit):
            return t.value
        if isinstance(t, Const):
            return self._ev_const(t)
        if isinstance(t, Ctor):
            return VCtor(t.ind, t.name, t.tyargs,
                         tuple(self._ev(a, venv) for a in t.args))
        if isinstance(t, T.App):
            return self._apply(self._ev(t.fn, venv), self._ev(t.arg, venv))
        if isinstance(t, Lam):
            if t.ann is TYPE or isinstance(t.ann, T.TypeSort):
                raise EvalError("cannot evaluate a bare type-lambda")
            return VClosure(t.var, t.body, venv)
        if isinstance(t, Match):
            s = self._ev(t.scrutinee, venv)
            return self._ev_match(t, s, venv)
        if isinstance(t, Fix):
            return VFixC(t, venv)
        raise EvalError(f"cannot evaluate {t!r}")

    def _ev_match(self, t: Match, s, venv):
        if t.ind == "bool":
            want = "true" if s else "false"
            for b in t.branches:
                if b.ctor == want:
                    return self._ev(b.rhs, venv)
            raise EvalError("non-exhaustive boolean match")
        if not isinstance(s, VCtor):
            raise EvalError(f"match scrutinee is not a constructor value: {s!r}")
        for b in t.branches:
            if b.ctor == s.name:
                venv2 = dict(venv)
                for n, v in zip(b.binders, s.args):
                    venv2[n] = v
                return self._ev(b.rhs, venv2)
        raise EvalError(f"non-exhaustive match on {t.ind}")

    def _ev_const(self, t: Const):
        key = (t.name, t.tyargs)
        if key in self._const_cache:
            return self._const_cache[key]
        if t.name in self.interp:
            arity, fn = self.interp[t.name]
            return VPyFun(t.name, arity, fn) if arity else fn()
        entry = self.env.defs.get(t.name)
        if entry is not None and entry.body is not None:
            body = _def_value(self.env, t.name, t.tyargs)
            if body is None:
                raise EvalError(f"cannot instantiate {t.name}")
            if T.is_formula(body):
                raise EvalError(f"{t.name} is a Prop constant, not a term")
            v = self._ev(body, {})
        elif entry is not None:
            # Parameter: model-assigned, else first element of its domain
            if t.name in self.model.params:
                v = self.model.params[t.name]
            else:
                ty = T.subst_ty(entry.scheme.body,
                                dict(zip(entry.scheme.vars, t.tyargs)))
                dom = self.enumerate_ty(ty)
                if not dom:
                    raise EnumerationError(f"empty domain for parameter {t.name}")
                v = dom[0]
        elif t.name in _BUILTIN_ARITY:
            return VBuiltin(t.name)
        else:
            raise EvalError(f"unknown constant {t.name}")
        self._const_cache[key] = v
        return v

    def _apply(self, f, a):
        self._burn()
        if isinstance(f, VClosure):
            venv2 = dict(f.venv)
            venv2[f.var] = a
            if T.is_formula(f.body):
                return self._evf(f.body, venv2, self._small_budget())
            return self._ev(f.body, venv2)
        if isinstance(f, VFixC):
            venv2 = dict(f.venv)
            venv2[f.fix.name] = f
            inner = self._ev(f.fix.body, venv2)
            return self._apply(inner, a)
        if isinstance(f, VFun):
            return f.lookup(a)
        if isinstance(f, VBuiltin):
            args = f.args + (a,)
            if len(args) == _BUILTIN_ARITY[f.name]:
                return _builtin_apply(f.name, args)
            return VBuiltin(f.name, args)
        if isinstance(f, VPyFun):
            args = f.args + (a,)
            if len(args) == f.arity:
                return f.fn(*args)
            return VPyFun(f.name, f.arity, f.fn, args)
        raise EvalError(f"cannot apply non-function value {f!r}")

    def _small_budget(self) -> int:
        return max(64, self.model.budget // 64)

    # -- formula evaluation --------------------------------------------------

    def _evf(self, f, venv, budget: int) -> bool:
        self._burn()
        if isinstance(f, T.TrueF):
            return True
        if isinstance(f, T.FalseF):
            return False
        if isinstance(f, T.Not):
            return not self._evf(f.body, venv, budget)
        if isinstance(f, T.And):
            return self._evf(f.lhs, venv, budget) and self._evf(f.rhs, venv, budget)
        if isinstance(f, T.Or):
            return self._evf(f.lhs, venv, budget) or self._evf(f.rhs, venv, budget)
        if isinstance(f, T.Impl):
            return (not self._evf(f.lhs, venv, budget)) or self._evf(f.rhs, venv, budget)
        if isinstance(f, T.Iff):
            return self._evf(f.lhs, venv, budget) == self._evf(f.rhs, venv, budget)
        if isinstance(f, Forall):
            if f.ann is TYPE or isinstance(f.ann, T.TypeSort):
                fam = self.type_family()
                for ty in fam:
                    inst = T.inst_ty_sub(f.body, {f.var: ty})
                    if not self._evf(inst, venv, max(1, budget // max(1, len(fam)))):
                        return False
                return True
            dom, sub_budget = self._quant_domain(f, budget)
            for v in dom:
                venv[f.var] = v
                ok = self._evf(f.body, venv, sub_budget)
                del venv[f.var]
                if not ok:
                    return False
            return True
        if isinstance(f, T.Exists):
            # Existentials search the full enumerated domain: truncating
            # here could miss a witness and falsify a true statement.
            dom = self.enumerate_ty(f.ann)
            sub_budget = max(16, budget // 8)
            for v in dom:
                venv[f.var] = v
                ok = self._evf(f.body, venv, sub_budget)
                del venv[f.var]
                if ok:
                    return True
            return False
        if isinstance(f, Eq):
            if isinstance(f.ty, Scheme):
                return self._eval_scheme_eq(f, venv, budget)
            l = self._ev(f.lhs, venv)
            r = self._ev(f.rhs, venv)
            return self._val_eq(l, r, f.ty, budget)
        if isinstance(f, T.IsTrue):
            v = self._ev(f.arg, venv)
            if not isinstance(v, bool):
                raise EvalError("IsTrue applied to a non-boolean value")
            return v
        if isinstance(f, PredApp):
            return self._eval_predapp(f, venv, budget)
        raise EvalError(f"cannot evaluate formula {f!r}")

    _SMALL_DOMAIN = 32

    def _quant_domain(self, f, budget: int):
        """Universal domain under the assignment budget: allowance is the
        budget split multiplicatively over the static quantifier depth.
        Shallow prefixes (depth <= 2) never truncate small domains, so the
        common scalar types are evaluated exactly; deeper prefixes honor the
        allowance strictly to keep the assignment count near the budget."""
        d = _qdepth(f)
        allowance = max(2, int(budget ** (1.0 / d))) if d > 1 else max(2, budget)
        dom = self.enumerate_ty(f.ann)
        if d <= 2:
            if len(dom) > self._SMALL_DOMAIN:
                dom = dom[:max(allowance, self._SMALL_DOMAIN)]
        elif len(dom) > allowance:
            dom = dom[:allowance]
        sub_budget = max(1, budget // max(1, len(dom)))
        return dom, sub_budget

    def _val_eq(self, l, r, ty, budget: int) -> bool:
        if isinstance(ty, Arrow):
            for d in self.enumerate_ty(ty.dom):
                if not self._val_eq(self._apply(l, d), self._apply(r, d),
                                    ty.cod, budget):
                    return False
            return True
        if isinstance(ty, T.PropTy):
            return bool(l) == bool(r)
        return l == r

    def _eval_scheme_eq(self, f: Eq, venv, budget: int) -> bool:
        sch: Scheme = f.ty
        for ty in self.type_family():
            sub = {v: ty for v in sch.vars}  # single-var schemes in practice
            tyargs = tuple(ty for _ in sch.vars)
            lhs = f.lhs
            if isinstance(lhs, Const) and not lhs.tyargs:
                lhs = Const(lhs.name, tyargs)
            else:
                lhs = self._peel_tylams(lhs, tyargs)
            rhs = self._peel_tylams(f.rhs, tyargs)
            body_ty = T.subst_ty(sch.body, sub)
            l = self._ev(lhs, dict(venv))
            r = self._ev(rhs, dict(venv))
            if not self._val_eq(l, r, body_ty, budget):
                return False
        return True

    def _peel_tylams(self, t, tyargs):
        sub = {}
        for ty in tyargs:
            if not (isinstance(t, Lam) and (t.ann is TYPE
                                            or isinstance(t.ann, T.TypeSort))):
                raise EvalError("scheme equation rhs is not a type-lambda")
            sub[t.var] = ty
            t = t.body
        return T.inst_ty_sub(t, sub)

    def _eval_predapp(self, f: PredApp, venv, budget: int) -> bool:
        args = [self._ev(a, venv) for a in f.args]
        if f.name in venv:
            v = venv[f.name]
            for a in args:
                v = self._apply(v, a)
            if not isinstance(v, bool):
                raise EvalError(f"predicate {f.name} did not evaluate to a boolean")
            return v
        if f.name == "Z.le":
            return args[0] <= args[1]
        if f.name == "Z.lt":
            return args[0] < args[1]
        if self.env.is_relation(f.name):
            return self._derivable(f.name, tuple(args), depth=0,
                                   visiting=frozenset(), budget=budget)
        entry = self.env.defs.get(f.name)
        if entry is not None and entry.body is not None:
            body = _def_value(self.env, f.name, f.tyargs)
            venv2: dict = {}
            for a in args:
                if not isinstance(body, Lam):
                    raise EvalError(f"predicate {f.name}: arity mismatch")
                venv2[body.var] = a
                body = body.body
            if not T.is_formula(body):
                raise EvalError(f"{f.name} is not Prop-valued")
            return self._evf(body, venv2, budget)
        raise EvalError(f"cannot evaluate predicate {f.name}")

    # -- derivation search for inductive relations ---------------------------

    _DERIV_DEPTH = 50
    _RESIDUAL_CAP = 64

    def _derivable(self, rel: str, args: tuple, depth: int, visiting,
                   budget: int) -> bool:
        try:
            key = (rel, args)
            hashable = True
            hash(key)
        except TypeError:
            hashable = False
            key = None
        if hashable and key in self._derived:
            return True
        if depth > self._DERIV_DEPTH:
            return False
        if hashable and key in visiting:
            return False
        if hashable:
            visiting = visiting | {key}
        decl = self.env.inductives[rel]
        for c in decl.ctors:
            bind: dict = {}
            deferred: list = []
            ok = True
            for pat, val in zip(c.indices, args):
                r = self._match_index(pat, val, bind)
                if r == "fail":
                    ok = False
                    break
                if r == "defer":
                    deferred.append((pat, val))
            if not ok:
                continue
            unbound = [n for n, _ in c.binders if n not in bind]
            if self._try_ctor(c, bind, unbound, deferred, rel, depth,
                              visiting, budget):
                if hashable:
                    self._derived.add(key)
                return True
        return False

    def _match_index(self, pat, val, bind) -> str:
        """Structural match of an index pattern against a value; returns
        "ok", "fail", or "defer" (pattern not structural, e.g. contains
        function applications)."""
        if isinstance(pat, Var):
            if pat.name in bind:
                return "ok" if bind[pat.name] == val else "fail"
            bind[pat.name] = val
            return "ok"
        if isinstance(pat, IntLit):
            return "ok" if val == pat.value else "fail"
        if isinstance(pat, BoolLit):
            return "ok" if val == pat.value else "fail"
        if isinstance(pat, Ctor):
            if not (isinstance(val, VCtor) and val.name == pat.name):
                return "fail"
            for p, v in zip(pat.args, val.args):
                r = self._match_index(p, v, bind)
                if r != "ok":
                    return r
            return "ok"
        return "defer"

    def _try_ctor(self, c, bind, unbound, deferred, rel, depth, visiting,
                  budget) -> bool:
        if unbound:
            name = unbound[0]
            ty = dict(c.binders)[name]
            pool = self.enumerate_ty(ty)[: self._RESIDUAL_CAP]
            for v in pool:
                bind2 = dict(bind)
                bind2[name] = v
                if self._try_ctor(c, bind2, unbound[1:], deferred, rel,
                                  depth, visiting, budget):
                    return True
            return False
        for pat, val in deferred:
            if self._ev(pat, dict(bind)) != val:
                return False
        for prem in c.premises:
            if not self._evf_premise(prem, dict(bind), depth, visiting, budget):
                return False
        return True

    def _evf_premise(self, prem, venv, depth, visiting, budget) -> bool:
        if isinstance(prem, PredApp) and self.env.is_relation(prem.name):
            args = tuple(self._ev(a, venv) for a in prem.args)
            return self._derivable(prem.name, args, depth + 1, visiting, budget)
        return self._evf(prem, venv, budget)


# ---------------------------------------------------------------------------
# convenience wrappers


def eval_term(env: GlobalEnv, t, model: "FiniteModel | None" = None,
              venv: "dict | None" = None) -> T.Term:
    return Oracle(env, model).eval_term(t, venv)


def eval_formula(env: GlobalEnv, f, model: "FiniteModel | None" = None,
                 venv: "dict | None" = None,
                 budget: "int | None" = None) -> bool:
    return Oracle(env, model).eval_formula(f, venv, budget)
