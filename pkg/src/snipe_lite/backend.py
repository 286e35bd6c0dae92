"""SMT-LIB2 emission and external solver hand-off.

`emit_smt` renders a fully preprocessed goal as an SMT-LIB2 refutation
script: hypotheses are asserted, the outermost universal prefix and
implications of the conclusion are skolemized into fresh declarations and
premise assertions, and the remaining matrix is asserted negated.  The
output is deterministic byte-for-byte for a given goal.

`solve` runs an external SMT solver on such a script and classifies the
outcome.
"""
from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass

from . import terms as T
from .terms import (
    BOOL, INT, Arrow, Const, Eq, Forall, Goal, GlobalEnv, IndTy, IsTrue,
    PredApp, Var, arrow_split, spine,
)


class EmitError(T.SnipeError):
    pass


# Integer-valued and boolean-valued built-in operators, by SMT counterpart.
_SMT_INT_OPS = {"Z.add": "+", "Z.sub": "-", "Z.mul": "*"}
_SMT_BOOL_OPS = {"Z.eqb": "=", "Z.leb": "<=", "Z.ltb": "<",
                 "Bool.andb": "and", "Bool.orb": "or", "Bool.implb": "=>",
                 "Bool.eqb": "=", "Bool.negb": "not"}
_SMT_REL_OPS = {"Z.le": "<=", "Z.lt": "<"}

# Characters allowed in SMT-LIB simple symbols (besides letters and digits).
_SYMBOL_CHARS = set("~!@$%^&*_-+=<>.?/")


def _symbol(name: str) -> str:
    """Render a name as an SMT-LIB symbol: unchanged when it is already a
    legal simple symbol, `|quoted|` otherwise."""
    if name and not name[0].isdigit() and all(
            ch.isalnum() or ch in _SYMBOL_CHARS for ch in name):
        return name
    if not name or "|" in name or "\\" in name:
        raise EmitError(f"cannot form an SMT symbol from {name!r}")
    return f"|{name}|"


def _mangle_ty(ty) -> str:
    """Flat, unambiguous spelling of a ground type, usable inside SMT
    symbols (`<`, `>` and `.` are legal symbol characters)."""
    if ty == INT:
        return "Z"
    if ty == BOOL:
        return "bool"
    if isinstance(ty, T.BaseTy):
        return ty.name
    if isinstance(ty, IndTy):
        if not ty.params:
            return ty.name
        return (ty.name + "<"
                + ".".join(_mangle_ty(p) for p in ty.params) + ">")
    if isinstance(ty, Arrow):
        return _mangle_ty(ty.dom) + "->" + _mangle_ty(ty.cod)
    raise EmitError(f"cannot emit the type {ty!r}")


def _mangle(name: str, tyargs) -> str:
    if not tyargs:
        return name
    return name + "<" + ".".join(_mangle_ty(t) for t in tyargs) + ">"


class _Emitter:
    def __init__(self, env: GlobalEnv):
        self.env = env
        self.sorts: dict[str, None] = {}
        self.funs: dict[str, tuple[tuple[str, ...], str]] = {}
        self.sym: dict[str, str] = {}  # goal-level names -> SMT symbols
        self.used: set[str] = set()
        self.asserts: list[tuple[str, str]] = []

    # -- sorts

    def sort(self, ty) -> str:
        if ty == INT:
            return "Int"
        if ty == BOOL or isinstance(ty, T.PropTy):
            return "Bool"
        if isinstance(ty, T.BaseTy):
            name = _symbol(_mangle_ty(ty))
            self.sorts.setdefault(name)
            return name
        if isinstance(ty, IndTy):
            name = _symbol(_mangle_ty(ty))
            self.sorts.setdefault(name)
            for p in ty.params:
                if isinstance(p, Arrow):
                    raise EmitError(
                        "function types inside type parameters cannot be "
                        "emitted")
                self.sort(p)  # register nested sorts
            return name
        if isinstance(ty, T.TypeVar):
            raise EmitError(
                f"the goal is still polymorphic (type variable {ty.name})")
        if isinstance(ty, Arrow):
            raise EmitError("function-sorted values cannot be emitted; "
                            "the goal is not first-order")
        raise EmitError(f"cannot emit the type {ty!r}")

    def _fn_sig(self, ty) -> tuple[tuple[str, ...], str]:
        doms, cod = arrow_split(ty)
        return tuple(self.sort(d) for d in doms), self.sort(cod)

    def declare_fun(self, symbol: str, doms: tuple[str, ...], cod: str) -> None:
        sig = (doms, cod)
        if symbol in self.funs:
            if self.funs[symbol] != sig:
                raise EmitError(f"conflicting declarations for {symbol}")
            return
        self.funs[symbol] = sig
        self.used.add(symbol)

    def declare_name(self, name: str, ty) -> str:
        """Declare a goal-level variable (context variable or skolemized
        binder) as an uninterpreted constant or function."""
        raw = name
        k = 0
        while _symbol(raw) in self.used:
            raw = f"{name}.{k}"
            k += 1
        symbol = _symbol(raw)
        self.declare_fun(symbol, *self._fn_sig(ty))
        self.sym[name] = symbol
        return symbol

    # -- constants, constructors, relations

    def const_symbol(self, name: str, tyargs) -> str:
        sch = self.env.const_scheme(name)
        if sch is None:
            raise EmitError(f"unknown constant {name}")
        if len(sch.vars) != len(tyargs):
            raise EmitError(f"{name}: wrong number of type arguments")
        ty = T.subst_ty(sch.body, dict(zip(sch.vars, tyargs)))
        if T.free_tyvars(ty):
            raise EmitError(f"{name} is used at a polymorphic type")
        symbol = _symbol(_mangle(name, tyargs))
        self.declare_fun(symbol, *self._fn_sig(ty))
        return symbol

    def ctor_symbol(self, ind: str, name: str, tyargs) -> str:
        doms = self.env.ctor_arg_tys(ind, name, tyargs)
        cod = IndTy(ind, tuple(tyargs))
        symbol = _symbol(_mangle(name, tyargs))
        self.declare_fun(symbol,
                         tuple(self.sort(d) for d in doms), self.sort(cod))
        return symbol

    def rel_symbol(self, name: str, tyargs) -> str:
        decl = self.env.inductives[name]
        sub = dict(zip(decl.params, tyargs))
        doms = tuple(self.sort(T.subst_ty(ty, sub)) for ty in decl.index_tys)
        symbol = _symbol(_mangle(name, tyargs))
        self.declare_fun(symbol, doms, "Bool")
        return symbol

    # -- terms

    def term(self, t, scope: dict[str, str]) -> str:
        if isinstance(t, T.IntLit):
            return str(t.value) if t.value >= 0 else f"(- {-t.value})"
        if isinstance(t, T.BoolLit):
            return "true" if t.value else "false"
        if isinstance(t, Var):
            return self._var(t.name, scope)
        head, args = spine(t)
        if isinstance(head, Var):
            if not args:
                return self._var(head.name, scope)
            return self._app(self._var(head.name, scope),
                             [self.term(a, scope) for a in args])
        if isinstance(head, Const):
            op = _SMT_INT_OPS.get(head.name) or _SMT_BOOL_OPS.get(head.name)
            if op is not None:
                want = 1 if head.name == "Bool.negb" else 2
                if len(args) != want:
                    raise EmitError(
                        f"{head.name} must be fully applied to be emitted")
                return self._app(op, [self.term(a, scope) for a in args])
            symbol = self.const_symbol(head.name, head.tyargs)
            return self._app(symbol, [self.term(a, scope) for a in args])
        if isinstance(head, T.Ctor):
            symbol = self.ctor_symbol(head.ind, head.name, head.tyargs)
            return self._app(symbol,
                             [self.term(a, scope)
                              for a in list(head.args) + args])
        raise EmitError(
            f"{type(head).__name__} terms cannot be emitted; the goal is "
            f"not first-order")

    def _var(self, name: str, scope: dict[str, str]) -> str:
        if name in scope:
            return scope[name]
        if name in self.sym:
            return self.sym[name]
        raise EmitError(f"unbound variable {name}")

    @staticmethod
    def _app(symbol: str, args: list[str]) -> str:
        if not args:
            return symbol
        return "(" + " ".join([symbol] + args) + ")"

    # -- formulas

    def formula(self, f, scope: dict[str, str]) -> str:
        if isinstance(f, T.TrueF):
            return "true"
        if isinstance(f, T.FalseF):
            return "false"
        if isinstance(f, T.Not):
            return f"(not {self.formula(f.body, scope)})"
        if isinstance(f, T.And):
            return self._conn("and", f, scope)
        if isinstance(f, T.Or):
            return self._conn("or", f, scope)
        if isinstance(f, T.Impl):
            return self._conn("=>", f, scope)
        if isinstance(f, T.Iff):
            return self._conn("=", f, scope)
        if isinstance(f, (Forall, T.Exists)):
            return self._quant(f, scope)
        if isinstance(f, Eq):
            if isinstance(f.ty, T.Scheme):
                raise EmitError("polymorphic equation cannot be emitted")
            if isinstance(f.ty, Arrow):
                raise EmitError("equality between functions cannot be "
                                "emitted; the goal is not first-order")
            self.sort(f.ty)
            return (f"(= {self.term(f.lhs, scope)} "
                    f"{self.term(f.rhs, scope)})")
        if isinstance(f, IsTrue):
            return self.term(f.arg, scope)
        if isinstance(f, PredApp):
            return self._predapp(f, scope)
        raise EmitError(f"cannot emit {type(f).__name__}")

    def _conn(self, op: str, f, scope) -> str:
        return (f"({op} {self.formula(f.lhs, scope)} "
                f"{self.formula(f.rhs, scope)})")

    def _quant(self, f, scope) -> str:
        if isinstance(f.ann, T.TypeSort):
            raise EmitError("the goal is still polymorphic "
                            "(quantification over types)")
        if isinstance(f.ann, Arrow):
            raise EmitError("quantification over functions cannot be "
                            "emitted; the goal is not first-order")
        op = "forall" if isinstance(f, Forall) else "exists"
        raw = f.var
        k = 0
        while _symbol(raw) in self.used or _symbol(raw) in scope.values():
            raw = f"{f.var}.{k}"
            k += 1
        symbol = _symbol(raw)
        inner = dict(scope)
        inner[f.var] = symbol
        return (f"({op} (({symbol} {self.sort(f.ann)})) "
                f"{self.formula(f.body, inner)})")

    def _predapp(self, f: PredApp, scope) -> str:
        args = [self.term(a, scope) for a in f.args]
        if f.name in _SMT_REL_OPS:
            if len(args) != 2:
                raise EmitError(f"{f.name} must be applied to two arguments")
            return self._app(_SMT_REL_OPS[f.name], args)
        if f.name in scope or f.name in self.sym:
            return self._app(self._var(f.name, scope), args)
        if self.env.is_relation(f.name):
            return self._app(self.rel_symbol(f.name, f.tyargs), args)
        if self.env.const_scheme(f.name) is not None:
            return self._app(self.const_symbol(f.name, f.tyargs), args)
        raise EmitError(f"unknown predicate {f.name}")

    # -- top level

    def add_assert(self, label: str, sexp: str) -> None:
        self.asserts.append((label, sexp))


def _at(label: str, thunk):
    """Evaluate `thunk`, prefixing any emission error with the location."""
    try:
        return thunk()
    except EmitError as exc:
        msg = str(exc)
        if msg.startswith("in "):
            raise
        raise EmitError(f"in {label}: {msg}") from None


def emit_smt(env: GlobalEnv, goal: Goal, logic: str = "ALL") -> str:
    """Render `goal` as an SMT-LIB2 refutation script."""
    em = _Emitter(env)
    for h in goal.hyps:
        if h.is_var:
            _at(f"variable {h.name}",
                lambda h=h: em.declare_name(h.name, h.body))
    for h in goal.hyps:
        if not h.is_var:
            em.add_assert(f"hyp {h.name}",
                          _at(f"hyp {h.name}",
                              lambda h=h: em.formula(h.body, {})))

    concl = goal.concl
    n_prem = 0
    while True:
        if isinstance(concl, Forall) and not isinstance(concl.ann, T.TypeSort):
            _at("the conclusion prefix",
                lambda c=concl: em.declare_name(c.var, c.ann))
            concl = concl.body
        elif isinstance(concl, T.Impl):
            n_prem += 1
            em.add_assert(f"premise {n_prem}",
                          _at(f"premise {n_prem}",
                              lambda c=concl: em.formula(c.lhs, {})))
            concl = concl.rhs
        else:
            break
    body = _at("the conclusion", lambda: em.formula(concl, {}))
    em.add_assert("negated conclusion", f"(not {body})")

    lines = [f"(set-logic {logic})"]
    for name in sorted(em.sorts):
        lines.append(f"(declare-sort {name} 0)")
    for symbol in sorted(em.funs):
        doms, cod = em.funs[symbol]
        if doms:
            lines.append(f"(declare-fun {symbol} ({' '.join(doms)}) {cod})")
        else:
            lines.append(f"(declare-const {symbol} {cod})")
    for label, sexp in em.asserts:
        lines.append(f"; {label}")
        lines.append(f"(assert {sexp})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Solver driver


@dataclass(frozen=True)
class SolverResult:
    kind: str  # unsat | sat | unknown | timeout | solver-error | spawn-failure
    detail: str = ""

    @property
    def proved(self) -> bool:
        return self.kind == "unsat"


def solve(smt: str, solver: "str | list[str]",
          timeout: float = 10.0) -> SolverResult:
    """Run an external SMT solver on the given script.

    `solver` is a command line (string or argv list); the script is fed to
    the solver on standard input and the verdict read from its standard
    output.
    """
    argv = shlex.split(solver) if isinstance(solver, str) else list(solver)
    if not argv:
        return SolverResult("spawn-failure", "empty solver command")
    try:
        proc = subprocess.run(argv, input=smt, capture_output=True,
                              text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        return SolverResult("timeout", f"no verdict within {timeout}s")
    except OSError as exc:
        return SolverResult("spawn-failure", str(exc))
    out_lines = proc.stdout.splitlines()
    for i, line in enumerate(out_lines):
        word = line.strip()
        if word in ("sat", "unsat", "unknown"):
            rest = "\n".join(out_lines[i + 1:]).strip()
            return SolverResult(word, rest)
    detail = (proc.stderr.strip() or proc.stdout.strip())[:400]
    return SolverResult("solver-error",
                        detail or f"exit code {proc.returncode}")


def check_goal(env: GlobalEnv, goal: Goal, solver: "str | list[str]",
               timeout: float = 10.0,
               logic: str = "ALL") -> tuple[SolverResult, str]:
    """Emit and solve in one step; returns the verdict and the script."""
    smt = emit_smt(env, goal, logic=logic)
    return solve(smt, solver, timeout), smt
