"""Concrete syntax: lexer, parser and elaboration into core trees.

Files are sequences of sentences terminated by `.`:

    Inductive / Definition / Fixpoint / Parameter / Variable / Hypothesis /
    Lemma / Goal / Trakt Add ...

Comments are `(* ... *)` and nest.  Identifiers may contain primes and
dotted segments (`Z.of_nat`).  See docs/grammar.md for the full grammar.

Parsing builds an untyped surface tree; elaboration resolves names against
the environment, infers omitted types with unification metavariables, fills
in constructor/constant type arguments, and splits terms from formulas.
Every elaborated sentence typechecks by construction.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import terms as T
from .terms import (
    BOOL, INT, PROP, TYPE, Arrow, BaseTy, BoolLit, Const, Ctor, CtorDecl,
    DefEntry, Eq, Exists, FalseF, Fix, Forall, GlobalEnv, Goal, Hyp, IndTy,
    InductiveDecl, IntLit, IsTrue, Lam, Match, Branch, Not, PredApp, Scheme,
    SnipeError, TrueF, TypeVar, Var, mk_app, mono,
)


class ParseError(SnipeError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


class TypecheckError(SnipeError):
    pass


class UnknownIdentifier(TypecheckError):
    pass


class UnboundVariable(TypecheckError):
    pass


class ArityError(TypecheckError):
    pass


# ---------------------------------------------------------------------------
# Lexer

KEYWORDS = {
    "forall", "exists", "fun", "match", "with", "end", "if", "then", "else",
    "fix", "Inductive", "Definition", "Fixpoint", "Parameter", "Variable",
    "Hypothesis", "Lemma", "Goal", "Trakt",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:\.[A-Za-z_][A-Za-z0-9_']*)*)
  | (?P<num>[0-9]+)
  | (?P<sym>:=|<->|->|=>|<=\?|<>|=\?|<\?|<=|>=|\\/|/\\|&&|\|\||[(),:.|@~=<>+\-*])
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str  # ident / num / sym / kw / eof
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Tok]:
    toks: list[Tok] = []
    i, line, bol = 0, 1, 0
    n = len(src)
    while i < n:
        if src.startswith("(*", i):
            depth, j = 1, i + 2
            while j < n and depth:
                if src.startswith("(*", j):
                    depth += 1
                    j += 2
                elif src.startswith("*)", j):
                    depth -= 1
                    j += 2
                else:
                    j += 1
            if depth:
                raise ParseError("unterminated comment", line, i - bol + 1)
            line += src.count("\n", i, j)
            if "\n" in src[i:j]:
                bol = i + src[i:j].rindex("\n") + 1
            i = j
            continue
        m = _TOKEN_RE.match(src, i)
        if not m:
            raise ParseError(f"unexpected character {src[i]!r}", line, i - bol + 1)
        if m.lastgroup == "ws":
            line += src.count("\n", i, m.end())
            if "\n" in src[i:m.end()]:
                bol = i + src[i:m.end()].rindex("\n") + 1
            i = m.end()
            continue
        text = m.group()
        col = i - bol + 1
        if m.lastgroup == "ident":
            kind = "kw" if text in KEYWORDS else "ident"
        elif m.lastgroup == "num":
            kind = "num"
        else:
            kind = "sym"
        toks.append(Tok(kind, text, line, col))
        i = m.end()
    toks.append(Tok("eof", "", line, i - bol + 1))
    return toks


# ---------------------------------------------------------------------------
# Surface trees


@dataclass
class SName:
    name: str
    line: int = 0
    col: int = 0


@dataclass
class SNum:
    value: int


@dataclass
class SApp:
    fn: object
    args: list


@dataclass
class SAt:
    name: str
    args: list
    line: int = 0
    col: int = 0


@dataclass
class SBinop:
    op: str
    lhs: object
    rhs: object


@dataclass
class SNot:
    body: object


@dataclass
class SBinder:
    names: list[str]
    ann: "object | None"


@dataclass
class SForall:
    binders: list[SBinder]
    body: object


@dataclass
class SExists:
    binders: list[SBinder]
    body: object


@dataclass
class SFun:
    binders: list[SBinder]
    body: object


@dataclass
class SMatch:
    scrutinee: object
    branches: list  # (ctor, [binder names], rhs)


@dataclass
class SIf:
    cond: object
    then: object
    els: object


@dataclass
class SFix:
    name: str
    ann: object
    body: object


# sentences


@dataclass
class SInductive:
    name: str
    params: list[str]
    arity: "object | None"      # expression ending in Prop/Type, or None
    ctors: list  # (name, [SBinder], expr|None)


@dataclass
class SDefinition:
    name: str
    binders: list[SBinder]
    result: "object | None"
    body: object
    fixpoint: bool


@dataclass
class SParameter:
    name: str
    ty: object


@dataclass
class SVariable:
    name: str
    ty: object


@dataclass
class SHypothesis:
    name: str
    body: object
    lemma: bool = False


@dataclass
class SGoal:
    body: object


@dataclass
class TraktCommand:
    kind: str  # embedding / symbol / relation / conversion
    args: list[str]
    line: int = 0


# ---------------------------------------------------------------------------
# Parser

BINOPS = {
    "->": (1, "right"),
    "<->": (2, "right"),
    "\\/": (3, "right"),
    "/\\": (4, "right"),
    "=": (6, "none"), "<>": (6, "none"), "=?": (6, "none"),
    "<=?": (6, "none"), "<?": (6, "none"), "<=": (6, "none"),
    "<": (6, "none"), ">=": (6, "none"), ">": (6, "none"),
    "||": (7, "left"),
    "&&": (8, "left"),
    "+": (9, "left"), "-": (9, "left"),
    "*": (10, "left"),
}

PREC_NOT = 5


class Parser:
    def __init__(self, toks: list[Tok]):
        self.toks = toks
        self.i = 0

    # -- token plumbing

    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("sym", "kw")

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def expect(self, text: str) -> Tok:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def expect_ident(self) -> Tok:
        t = self.next()
        if t.kind != "ident":
            raise ParseError(f"expected identifier, found {t.text!r}", t.line, t.col)
        return t

    def err(self, msg: str) -> ParseError:
        t = self.peek()
        return ParseError(msg, t.line, t.col)

    # -- expressions

    def parse_expr(self, min_prec: int = 0):
        lhs = self.parse_prefix()
        seen_cmp = False
        while True:
            t = self.peek()
            info = BINOPS.get(t.text) if t.kind == "sym" else None
            if info is None or info[0] < min_prec:
                return lhs
            prec, assoc = info
            if prec == 6:
                if seen_cmp:
                    raise ParseError("comparison operators do not chain",
                                     t.line, t.col)
                seen_cmp = True
            self.next()
            if assoc == "right":
                rhs = self.parse_expr(prec)
            else:
                rhs = self.parse_expr(prec + 1)
            if t.text == ">=":
                lhs = SBinop("<=", rhs, lhs)
            elif t.text == ">":
                lhs = SBinop("<", rhs, lhs)
            else:
                lhs = SBinop(t.text, lhs, rhs)

    def parse_prefix(self):
        t = self.peek()
        if t.text == "~" and t.kind == "sym":
            self.next()
            return SNot(self.parse_expr(PREC_NOT + 1))
        if t.text == "-" and t.kind == "sym":
            self.next()
            operand = self.parse_app()
            if isinstance(operand, SNum):
                return SNum(-operand.value)
            return SBinop("-", SNum(0), operand)
        if t.text == "forall":
            self.next()
            binders = self.parse_binders(stop=",")
            self.expect(",")
            return SForall(binders, self.parse_expr(0))
        if t.text == "exists":
            self.next()
            binders = self.parse_binders(stop=",")
            self.expect(",")
            return SExists(binders, self.parse_expr(0))
        if t.text == "fun":
            self.next()
            binders = self.parse_binders(stop="=>")
            self.expect("=>")
            return SFun(binders, self.parse_expr(0))
        if t.text == "fix":
            self.next()
            name = self.expect_ident().text
            self.expect(":")
            ann = self.parse_expr(0)
            self.expect(":=")
            return SFix(name, ann, self.parse_expr(0))
        return self.parse_app()

    def parse_app(self):
        fn = self.parse_atom()
        args = []
        while self.starts_atom():
            args.append(self.parse_atom())
        if isinstance(fn, SAt):
            fn.args.extend(args)
            return fn
        return SApp(fn, args) if args else fn

    def starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("ident", "num"):
            return True
        if t.kind == "sym" and t.text in ("(", "@"):
            return True
        if t.kind == "kw" and t.text in ("match", "if"):
            return True
        return False

    def parse_atom(self):
        t = self.peek()
        if t.kind == "ident":
            self.next()
            return SName(t.text, t.line, t.col)
        if t.kind == "num":
            self.next()
            return SNum(int(t.text))
        if t.text == "@":
            self.next()
            name = self.expect_ident()
            return SAt(name.text, [], name.line, name.col)
        if t.text == "(":
            self.next()
            e = self.parse_expr(0)
            self.expect(")")
            return e
        if t.text == "match":
            return self.parse_match()
        if t.text == "if":
            self.next()
            c = self.parse_expr(0)
            self.expect("then")
            a = self.parse_expr(0)
            self.expect("else")
            b = self.parse_expr(0)
            return SIf(c, a, b)
        raise self.err(f"expected an expression, found {t.text!r}")

    def parse_match(self):
        self.expect("match")
        scrut = self.parse_expr(0)
        self.expect("with")
        branches = []
        wild = 0
        while self.eat("|"):
            ctor = self.expect_ident().text
            binders = []
            while self.peek().kind == "ident" or self.at("_"):
                tok = self.next()
                name = tok.text
                if name == "_":
                    name = f"_{wild}" if wild else "_"
                    wild += 1
                binders.append(name)
            self.expect("=>")
            branches.append((ctor, binders, self.parse_expr(0)))
        self.expect("end")
        if not branches:
            raise self.err("match must have at least one branch")
        return SMatch(scrut, branches)

    def parse_binders(self, stop: str) -> list[SBinder]:
        binders: list[SBinder] = []
        while not self.at(stop):
            t = self.peek()
            if t.kind == "ident":
                self.next()
                if self.at(":") and all(b.ann is None for b in binders):
                    # `forall x y : T,` — one annotation for the whole run
                    self.next()
                    ann = self.parse_expr(0)
                    names = [n for b in binders for n in b.names] + [t.text]
                    return [SBinder(names, ann)]
                binders.append(SBinder([t.text], None))
            elif self.eat("("):
                names = [self.expect_ident().text]
                while self.peek().kind == "ident":
                    names.append(self.next().text)
                self.expect(":")
                ann = self.parse_expr(0)
                self.expect(")")
                binders.append(SBinder(names, ann))
            else:
                raise self.err(f"expected a binder, found {t.text!r}")
        if not binders:
            raise self.err("expected at least one binder")
        return binders

    # -- sentences

    def parse_sentence(self):
        t = self.peek()
        if t.kind == "eof":
            return None
        if t.text == "Inductive":
            return self.parse_inductive()
        if t.text in ("Definition", "Fixpoint"):
            return self.parse_definition(fixpoint=t.text == "Fixpoint")
        if t.text == "Parameter":
            self.next()
            name = self.expect_ident().text
            self.expect(":")
            ty = self.parse_expr(0)
            self.expect(".")
            return SParameter(name, ty)
        if t.text == "Variable":
            self.next()
            name = self.expect_ident().text
            self.expect(":")
            ty = self.parse_expr(0)
            self.expect(".")
            return SVariable(name, ty)
        if t.text in ("Hypothesis", "Lemma"):
            self.next()
            name = self.expect_ident().text
            self.expect(":")
            body = self.parse_expr(0)
            self.expect(".")
            return SHypothesis(name, body, lemma=t.text == "Lemma")
        if t.text == "Goal":
            self.next()
            body = self.parse_expr(0)
            self.expect(".")
            return SGoal(body)
        if t.text == "Trakt":
            return self.parse_trakt()
        raise self.err(f"expected a sentence, found {t.text!r}")

    def parse_inductive(self):
        self.expect("Inductive")
        name = self.expect_ident().text
        params: list[str] = []
        while self.at("("):
            self.next()
            names = [self.expect_ident().text]
            while self.peek().kind == "ident":
                names.append(self.next().text)
            self.expect(":")
            if not (self.peek().kind == "ident" and self.peek().text == "Type"):
                raise self.err("inductive parameters must have sort Type")
            self.next()
            self.expect(")")
            params.extend(names)
        arity = None
        if self.eat(":"):
            arity = self.parse_expr(0)
        self.expect(":=")
        ctors = []
        self.eat("|")
        while True:
            cname = self.expect_ident().text
            binders: list[SBinder] = []
            while self.at("("):
                self.next()
                names = [self.expect_ident().text]
                while self.peek().kind == "ident":
                    names.append(self.next().text)
                self.expect(":")
                ann = self.parse_expr(0)
                self.expect(")")
                binders.append(SBinder(names, ann))
            spec = None
            if self.eat(":"):
                spec = self.parse_expr(0)
            ctors.append((cname, binders, spec))
            if not self.eat("|"):
                break
        self.expect(".")
        return SInductive(name, params, arity, ctors)

    def parse_definition(self, fixpoint: bool):
        self.next()
        name = self.expect_ident().text
        binders: list[SBinder] = []
        while self.at("(") or self.peek().kind == "ident":
            t = self.peek()
            if t.kind == "ident":
                self.next()
                binders.append(SBinder([t.text], None))
            else:
                self.next()
                names = [self.expect_ident().text]
                while self.peek().kind == "ident":
                    names.append(self.next().text)
                self.expect(":")
                ann = self.parse_expr(0)
                self.expect(")")
                binders.append(SBinder(names, ann))
        result = None
        if self.eat(":"):
            result = self.parse_expr(0)
        self.expect(":=")
        body = self.parse_expr(0)
        self.expect(".")
        if fixpoint and result is None:
            raise self.err("Fixpoint requires a result type annotation")
        return SDefinition(name, binders, result, body, fixpoint)

    def parse_trakt(self):
        line = self.peek().line
        self.expect("Trakt")
        w = self.expect_ident()
        if w.text != "Add":
            raise ParseError(f"expected 'Add', found {w.text!r}", w.line, w.col)
        kind = self.expect_ident().text
        args: list[str] = []
        while not self.at("."):
            t = self.next()
            if t.kind not in ("ident", "num"):
                raise ParseError(f"unexpected token {t.text!r} in Trakt command",
                                 t.line, t.col)
            args.append(t.text)
        self.expect(".")
        counts = {"Embedding": (6, 7), "Symbol": (3, 3), "Relation": (4, 4),
                  "Conversion": (1, 1)}
        if kind not in counts:
            raise ParseError(f"unknown Trakt command {kind!r}", w.line, w.col)
        lo, hi = counts[kind]
        if not lo <= len(args) <= hi:
            raise ParseError(
                f"Trakt Add {kind} expects {lo}"
                + (f"-{hi}" if hi != lo else "") + f" arguments, got {len(args)}",
                w.line, w.col)
        return TraktCommand(kind.lower(), args, line)

    def parse_file(self) -> list:
        out = []
        while True:
            s = self.parse_sentence()
            if s is None:
                return out
            out.append(s)


# ---------------------------------------------------------------------------
# Elaboration


@dataclass(frozen=True)
class MVar:
    uid: int


class Elab:
    def __init__(self, env: GlobalEnv):
        self.env = env
        self.meta: dict[int, object] = {}
        self._next = 0

    # -- metavariables

    def fresh_meta(self) -> MVar:
        self._next += 1
        return MVar(self._next)

    def zonk(self, ty):
        while isinstance(ty, MVar) and ty.uid in self.meta:
            ty = self.meta[ty.uid]
        if isinstance(ty, Arrow):
            return Arrow(self.zonk(ty.dom), self.zonk(ty.cod))
        if isinstance(ty, IndTy):
            return IndTy(ty.name, tuple(self.zonk(p) for p in ty.params))
        return ty

    def _head(self, ty):
        while isinstance(ty, MVar) and ty.uid in self.meta:
            ty = self.meta[ty.uid]
        return ty

    def _occurs(self, uid: int, ty) -> bool:
        ty = self._head(ty)
        if isinstance(ty, MVar):
            return ty.uid == uid
        if isinstance(ty, Arrow):
            return self._occurs(uid, ty.dom) or self._occurs(uid, ty.cod)
        if isinstance(ty, IndTy):
            return any(self._occurs(uid, p) for p in ty.params)
        return False

    def unify(self, a, b, what: str = "") -> None:
        a, b = self._head(a), self._head(b)
        if a is b or a == b:
            return
        if isinstance(a, MVar):
            if self._occurs(a.uid, b):
                raise TypecheckError(f"occurs check failed{': ' + what if what else ''}")
            self.meta[a.uid] = b
            return
        if isinstance(b, MVar):
            self.unify(b, a, what)
            return
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.dom, b.dom, what)
            self.unify(a.cod, b.cod, what)
            return
        if isinstance(a, IndTy) and isinstance(b, IndTy) and a.name == b.name:
            for x, y in zip(a.params, b.params):
                self.unify(x, y, what)
            return
        raise TypecheckError(
            f"type mismatch: {self.show(a)} vs {self.show(b)}"
            + (f" in {what}" if what else ""))

    def show(self, ty) -> str:
        from .printer import print_ty
        ty = self.zonk(ty)
        if isinstance(ty, MVar):
            return "?"
        if isinstance(ty, TypeSort):
            return "Type"
        return print_ty(ty)

    def zonk_deep(self, x):
        """Resolve all metavariables in a finished tree; raise on leftovers."""
        z = self.zonk_deep
        if isinstance(x, MVar):
            y = self._head(x)
            if isinstance(y, MVar):
                raise TypecheckError("cannot infer a type; add an annotation")
            return z(y)
        if isinstance(x, (TypeVar, BaseTy, T.IntTy, T.BoolTy, T.PropTy,
                          T.TypeSort)):
            return x
        if isinstance(x, Arrow):
            return Arrow(z(x.dom), z(x.cod))
        if isinstance(x, IndTy):
            return IndTy(x.name, tuple(z(p) for p in x.params))
        if isinstance(x, Scheme):
            return Scheme(x.vars, z(x.body))
        if isinstance(x, (Var, IntLit, BoolLit, TrueF, FalseF)):
            return x
        if isinstance(x, Const):
            return Const(x.name, tuple(z(t) for t in x.tyargs))
        if isinstance(x, Ctor):
            return Ctor(x.ind, x.name, tuple(z(t) for t in x.tyargs),
                        tuple(z(a) for a in x.args))
        if isinstance(x, T.App):
            return T.App(z(x.fn), z(x.arg))
        if isinstance(x, Lam):
            return Lam(x.var, z(x.ann), z(x.body))
        if isinstance(x, Match):
            return Match(z(x.scrutinee), x.ind,
                         tuple(Branch(b.ctor, b.binders, z(b.rhs)) for b in x.branches))
        if isinstance(x, Fix):
            return Fix(x.name, z(x.ann), z(x.body))
        if isinstance(x, Forall):
            return Forall(x.var, z(x.ann), z(x.body))
        if isinstance(x, Exists):
            return Exists(x.var, z(x.ann), z(x.body))
        if isinstance(x, (T.Impl, T.And, T.Or, T.Iff)):
            return type(x)(z(x.lhs), z(x.rhs))
        if isinstance(x, Not):
            return Not(z(x.body))
        if isinstance(x, Eq):
            return Eq(z(x.ty), z(x.lhs), z(x.rhs))
        if isinstance(x, PredApp):
            return PredApp(x.name, tuple(z(t) for t in x.tyargs),
                           tuple(z(a) for a in x.args))
        if isinstance(x, IsTrue):
            return IsTrue(z(x.arg))
        raise TypeError(f"zonk_deep: {x!r}")

    # -- types

    def elab_type(self, s, locals: dict, allow_prop: bool = True):
        """Elaborate a surface expression as a type (never Type itself)."""
        if isinstance(s, SName):
            n = s.name
            if n in locals and locals[n] is TYPE:
                return TypeVar(n)
            if n == "Z":
                return INT
            if n == "bool":
                return BOOL
            if n == "Prop":
                if not allow_prop:
                    raise TypecheckError("Prop not allowed here")
                return PROP
            if n == "Type":
                raise TypecheckError("Type is not a first-class type here")
            if n in self.env.base_sorts:
                return BaseTy(n)
            if n in self.env.inductives:
                d = self.env.inductives[n]
                if d.params:
                    raise ArityError(f"{n} expects {len(d.params)} type argument(s)")
                if d.is_prop:
                    raise TypecheckError(f"{n} is a relation, not a type")
                return IndTy(n, ())
            raise UnknownIdentifier(f"unknown type {n!r} at {s.line}:{s.col}")
        if isinstance(s, SApp) and isinstance(s.fn, SName):
            n = s.fn.name
            if n in self.env.inductives:
                d = self.env.inductives[n]
                if d.is_prop:
                    raise TypecheckError(f"{n} is a relation, not a type")
                if len(s.args) != len(d.params):
                    raise ArityError(f"{n} expects {len(d.params)} type argument(s)")
                return IndTy(n, tuple(self.elab_type(a, locals) for a in s.args))
            raise UnknownIdentifier(f"unknown type constructor {n!r}")
        if isinstance(s, SBinop) and s.op == "->":
            dom = self.elab_type(s.lhs, locals)
            cod = self.elab_type(s.rhs, locals)
            return Arrow(dom, cod)
        raise TypecheckError(f"expected a type, found {type(s).__name__}")

    def elab_scheme(self, s, locals: dict) -> Scheme:
        if isinstance(s, SForall):
            vars: list[str] = []
            inner = dict(locals)
            for b in s.binders:
                if not (isinstance(b.ann, SName) and b.ann.name == "Type"):
                    raise TypecheckError("type schemes quantify over Type only")
                for n in b.names:
                    vars.append(n)
                    inner[n] = TYPE
            return Scheme(tuple(vars), self.elab_type(s.body, inner))
        return mono(self.elab_type(s, locals))

    # -- formula/term discrimination

    def looks_formula(self, s, locals: dict) -> bool:
        if isinstance(s, (SForall, SExists, SNot)):
            return True
        if isinstance(s, SBinop):
            return s.op in ("->", "<->", "/\\", "\\/", "=", "<>", "<=", "<")
        if isinstance(s, SName):
            if s.name in ("True", "False"):
                return True
            s_app_head = s.name
        elif isinstance(s, (SApp, SAt)):
            head = s.fn if isinstance(s, SApp) else s
            if isinstance(s, SApp) and not isinstance(head, SName):
                return False
            s_app_head = head.name
        else:
            return False
        if s_app_head in locals:
            ty = locals[s_app_head]
            if ty is TYPE or isinstance(ty, Scheme):
                return False
            _, cod = T.arrow_split(self.zonk(ty)) if not isinstance(ty, MVar) else ([], ty)
            return cod == PROP
        if self.env.is_relation(s_app_head) or s_app_head in T.BUILTIN_RELS:
            return True
        sch = self.env.const_scheme(s_app_head)
        if sch is not None:
            _, cod = T.arrow_split(sch.body)
            return cod == PROP
        return False

    # -- formulas

    def elab_formula(self, s, locals: dict):
        if isinstance(s, SForall):
            return self._elab_quant(s, locals, Forall, allow_type=True)
        if isinstance(s, SExists):
            return self._elab_quant(s, locals, Exists, allow_type=False)
        if isinstance(s, SNot):
            return Not(self.elab_formula(s.body, locals))
        if isinstance(s, SBinop):
            op = s.op
            if op == "->":
                return T.Impl(self.elab_formula(s.lhs, locals),
                              self.elab_formula(s.rhs, locals))
            if op == "<->":
                return T.Iff(self.elab_formula(s.lhs, locals),
                             self.elab_formula(s.rhs, locals))
            if op == "/\\":
                return T.And(self.elab_formula(s.lhs, locals),
                             self.elab_formula(s.rhs, locals))
            if op == "\\/":
                return T.Or(self.elab_formula(s.lhs, locals),
                            self.elab_formula(s.rhs, locals))
            if op in ("=", "<>"):
                eq = self._elab_eq(s.lhs, s.rhs, locals)
                return Not(eq) if op == "<>" else eq
            if op in ("<=", "<"):
                name = "Z.le" if op == "<=" else "Z.lt"
                l, lt = self.elab_term(s.lhs, locals)
                r, rt = self.elab_term(s.rhs, locals)
                self.unify(lt, INT, op)
                self.unify(rt, INT, op)
                return PredApp(name, (), (l, r))
            if op in ("=?", "<=?", "<?", "&&", "||", "+", "-", "*"):
                raise TypecheckError(
                    f"boolean/arithmetic term used as a formula; "
                    f"write `t = true` for boolean terms (operator {op!r})")
            raise TypecheckError(f"unknown operator {op!r}")
        if isinstance(s, SName):
            if s.name == "True":
                return TrueF()
            if s.name == "False":
                return FalseF()
            return self._elab_predapp(s.name, [], locals, s)
        if isinstance(s, SApp) and isinstance(s.fn, SName):
            return self._elab_predapp(s.fn.name, s.args, locals, s.fn)
        if isinstance(s, SAt):
            return self._elab_predapp(s.name, s.args, locals, s, explicit=True)
        raise TypecheckError(f"expected a formula, found {type(s).__name__}")

    def _elab_quant(self, s, locals, cls, allow_type: bool):
        inner = dict(locals)
        binders: list[tuple[str, object]] = []
        for b in s.binders:
            if b.ann is not None and isinstance(b.ann, SName) and b.ann.name == "Type":
                if not allow_type:
                    raise TypecheckError("exists cannot bind a type variable")
                for n in b.names:
                    inner[n] = TYPE
                    binders.append((n, TYPE))
                continue
            ann = self.elab_type(b.ann, inner) if b.ann is not None else None
            for n in b.names:
                ty = ann if ann is not None else self.fresh_meta()
                inner[n] = ty
                binders.append((n, ty))
        body = self.elab_formula(s.body, inner)
        for n, ty in reversed(binders):
            body = cls(n, ty, body)
        return body

    def _elab_eq(self, lhs, rhs, locals):
        # Special case: equation `c = fun (A : Type) ... => ...` between a
        # polymorphic constant and its definition, typed at a Scheme.
        if isinstance(lhs, SName):
            sch = self.env.const_scheme(lhs.name)
            if (sch is not None and sch.vars and lhs.name not in locals
                    and isinstance(rhs, SFun)
                    and any(isinstance(b.ann, SName) and b.ann.name == "Type"
                            for b in rhs.binders)):
                rterm, rsch = self.elab_poly_value(rhs, locals)
                if len(rsch.vars) != len(sch.vars):
                    raise TypecheckError("scheme arity mismatch in equation")
                self.unify(T.subst_ty(rsch.body,
                                      {v: TypeVar(w) for v, w in zip(rsch.vars, sch.vars)}),
                           sch.body, f"definition of {lhs.name}")
                return Eq(sch, Const(lhs.name, ()), rterm)
        l, lt = self.elab_term(lhs, locals)
        r, rt = self.elab_term(rhs, locals)
        self.unify(lt, rt, "equality")
        ty = self.zonk(lt)
        return T.mk_eq(ty, l, r)

    def _elab_predapp(self, name, sargs, locals, pos, explicit: bool = False):
        if name in locals and locals[name] is not TYPE:
            args = []
            ty = locals[name]
            for a in sargs:
                at, aty = self.elab_term(a, locals)
                h = self._head(ty)
                if isinstance(h, MVar):
                    d, c = self.fresh_meta(), self.fresh_meta()
                    self.unify(h, Arrow(d, c))
                    h = Arrow(d, c)
                if not isinstance(h, Arrow):
                    raise TypecheckError(f"{name} applied to too many arguments")
                self.unify(aty, h.dom, f"argument of {name}")
                args.append(at)
                ty = h.cod
            self.unify(ty, PROP, f"{name} used as a formula")
            return PredApp(name, (), tuple(args))
        if self.env.is_relation(name):
            decl = self.env.inductives[name]
            if len(sargs) != len(decl.index_tys):
                raise ArityError(
                    f"relation {name} expects {len(decl.index_tys)} argument(s),"
                    f" got {len(sargs)}")
            args = []
            for a, ity in zip(sargs, decl.index_tys):
                at, aty = self.elab_term(a, locals)
                self.unify(aty, ity, f"argument of {name}")
                args.append(at)
            return PredApp(name, (), tuple(args))
        if name in T.BUILTIN_RELS:
            sig = T.BUILTIN_RELS[name]
            if len(sargs) != len(sig):
                raise ArityError(f"{name} expects {len(sig)} argument(s)")
            args = []
            for a, ity in zip(sargs, sig):
                at, aty = self.elab_term(a, locals)
                self.unify(aty, ity, f"argument of {name}")
                args.append(at)
            return PredApp(name, (), tuple(args))
        sch = self.env.const_scheme(name)
        if sch is not None:
            _, cod = T.arrow_split(sch.body)
            if cod != PROP:
                raise TypecheckError(f"{name} is not a predicate")
            if explicit:
                if len(sargs) < len(sch.vars):
                    raise ArityError(f"@{name} needs {len(sch.vars)} type argument(s)")
                tyargs = tuple(self.elab_type(a, locals) for a in sargs[:len(sch.vars)])
                sargs = sargs[len(sch.vars):]
            else:
                tyargs = tuple(self.fresh_meta() for _ in sch.vars)
            body = T.subst_ty(sch.body, dict(zip(sch.vars, tyargs)))
            arg_tys, _ = T.arrow_split(body)
            if len(sargs) != len(arg_tys):
                raise ArityError(f"predicate {name} expects {len(arg_tys)} argument(s)")
            args = []
            for a, ity in zip(sargs, arg_tys):
                at, aty = self.elab_term(a, locals)
                self.unify(aty, ity, f"argument of {name}")
                args.append(at)
            return PredApp(name, tyargs, tuple(args))
        raise UnknownIdentifier(f"unknown predicate {name!r}")

    # -- terms

    def elab_term(self, s, locals: dict):
        """Returns (term, type); type may contain metavariables."""
        if isinstance(s, SNum):
            return IntLit(s.value), INT
        if isinstance(s, SName):
            return self._elab_name(s.name, [], locals, s)
        if isinstance(s, SAt):
            return self._elab_name(s.name, s.args, locals, s, explicit=True)
        if isinstance(s, SApp):
            if isinstance(s.fn, SName):
                return self._elab_name(s.fn.name, s.args, locals, s.fn)
            fn, fnty = self.elab_term(s.fn, locals)
            return self._apply(fn, fnty, s.args, locals, "application")
        if isinstance(s, SBinop):
            op_map = {"+": "Z.add", "-": "Z.sub", "*": "Z.mul", "=?": "Z.eqb",
                      "<=?": "Z.leb", "<?": "Z.ltb", "&&": "Bool.andb",
                      "||": "Bool.orb"}
            if s.op in op_map:
                cname = op_map[s.op]
                sig = T.BUILTIN_CONSTS[cname].body
                (d1, rest) = sig.dom, sig.cod
                d2, out = rest.dom, rest.cod
                l, lt = self.elab_term(s.lhs, locals)
                r, rt = self.elab_term(s.rhs, locals)
                self.unify(lt, d1, s.op)
                self.unify(rt, d2, s.op)
                return mk_app(Const(cname, ()), [l, r]), out
            raise TypecheckError(f"operator {s.op!r} does not form a term")
        if isinstance(s, SFun):
            inner = dict(locals)
            binders = []
            for b in s.binders:
                if isinstance(b.ann, SName) and b.ann.name == "Type":
                    for n in b.names:
                        inner[n] = TYPE
                        binders.append((n, TYPE))
                    continue
                ann = self.elab_type(b.ann, inner) if b.ann is not None else None
                for n in b.names:
                    ty = ann if ann is not None else self.fresh_meta()
                    inner[n] = ty
                    binders.append((n, ty))
            if self.looks_formula(s.body, inner):
                body = self.elab_formula(s.body, inner)
                bty = PROP
            else:
                body, bty = self.elab_term(s.body, inner)
            term, ty = body, bty
            for n, t in reversed(binders):
                term = Lam(n, t, term)
                if t is TYPE:
                    if not isinstance(ty, (Arrow, T.IntTy, T.BoolTy, T.PropTy,
                                           BaseTy, IndTy, TypeVar)):
                        ty = self.zonk(ty)
                    # the type of a type-lambda is a Scheme, handled by callers
                    ty = ("scheme", n, ty)
                else:
                    if isinstance(ty, tuple):
                        raise TypecheckError("type binders must be a prefix")
                    ty = Arrow(t, ty)
            return term, ty
        if isinstance(s, SIf):
            c, ct = self.elab_term(s.cond, locals)
            self.unify(ct, BOOL, "if condition")
            a, at = self.elab_term(s.then, locals)
            b, bt = self.elab_term(s.els, locals)
            self.unify(at, bt, "if branches")
            return Match(c, "bool", (Branch("true", (), a), Branch("false", (), b))), at
        if isinstance(s, SMatch):
            return self._elab_match(s, locals)
        if isinstance(s, SFix):
            ann = self.elab_type(s.ann, locals)
            inner = dict(locals)
            inner[s.name] = ann
            body, bty = self.elab_term(s.body, inner)
            self.unify(bty, ann, f"fix {s.name}")
            return Fix(s.name, self.zonk(ann), body), ann
        raise TypecheckError(f"expected a term, found {type(s).__name__}")

    def elab_poly_value(self, s: SFun, locals: dict):
        """Elaborate `fun (A : Type) ... => body` to (term, Scheme)."""
        term, ty = self.elab_term(s, locals)
        vars: list[str] = []
        while isinstance(ty, tuple) and ty[0] == "scheme":
            vars.append(ty[1])
            ty = ty[2]
        return term, Scheme(tuple(vars), self.zonk(ty))

    def _elab_name(self, name, sargs, locals, pos, explicit: bool = False):
        if name in ("true", "false"):
            if sargs:
                raise ArityError(f"{name} takes no arguments")
            return BoolLit(name == "true"), BOOL
        if name in locals:
            ty = locals[name]
            if ty is TYPE:
                raise TypecheckError(f"type variable {name} used as a term")
            return self._apply(Var(name), ty, sargs, locals, name)
        info = self.env.ctor_info(name)
        if info is not None:
            ind, _ = info
            decl = self.env.inductives[ind]
            if decl.is_prop:
                raise TypecheckError(
                    f"{name} is a constructor of relation {ind}, not a term")
            cd = decl.ctor(name)
            if explicit:
                if len(sargs) < len(decl.params):
                    raise ArityError(f"@{name} needs {len(decl.params)} type argument(s)")
                tyargs = tuple(self.elab_type(a, locals) for a in sargs[:len(decl.params)])
                sargs = sargs[len(decl.params):]
            else:
                tyargs = tuple(self.fresh_meta() for _ in decl.params)
            if len(sargs) != len(cd.binders):
                raise ArityError(
                    f"constructor {name} must be fully applied "
                    f"({len(cd.binders)} argument(s), got {len(sargs)})")
            sub = dict(zip(decl.params, tyargs))
            args = []
            for a, (_, bt) in zip(sargs, cd.binders):
                at, aty = self.elab_term(a, locals)
                self.unify(aty, T.subst_ty(bt, sub), f"argument of {name}")
                args.append(at)
            return Ctor(ind, name, tyargs, tuple(args)), IndTy(ind, tyargs)
        sch = self.env.const_scheme(name)
        if sch is not None:
            if explicit:
                if len(sargs) < len(sch.vars):
                    raise ArityError(f"@{name} needs {len(sch.vars)} type argument(s)")
                tyargs = tuple(self.elab_type(a, locals) for a in sargs[:len(sch.vars)])
                sargs = sargs[len(sch.vars):]
            else:
                tyargs = tuple(self.fresh_meta() for _ in sch.vars)
            ty = T.subst_ty(sch.body, dict(zip(sch.vars, tyargs)))
            return self._apply(Const(name, tyargs), ty, sargs, locals, name)
        if self.env.is_relation(name) or name in T.BUILTIN_RELS:
            raise TypecheckError(f"relation {name} used in term position")
        raise UnknownIdentifier(f"unknown identifier {name!r}"
                                + (f" at {pos.line}:{pos.col}"
                                   if getattr(pos, "line", 0) else ""))

    def _apply(self, fn, fnty, sargs, locals, what):
        for a in sargs:
            h = self._head(fnty)
            if isinstance(h, MVar):
                d, c = self.fresh_meta(), self.fresh_meta()
                self.unify(h, Arrow(d, c))
                h = Arrow(d, c)
            if not isinstance(h, Arrow):
                raise TypecheckError(f"{what}: not a function "
                                     f"(has type {self.show(h)})")
            at, aty = self.elab_term(a, locals)
            self.unify(aty, h.dom, f"argument of {what}")
            fn = T.App(fn, at)
            fnty = h.cod
        return fn, fnty

    def _elab_match(self, s: SMatch, locals):
        scrut, sty = self.elab_term(s.scrutinee, locals)
        first = s.branches[0][0]
        if first in ("true", "false"):
            ind, decl = "bool", None
            self.unify(sty, BOOL, "match scrutinee")
            order = ["true", "false"]
            ctor_binders = {"true": [], "false": []}
        else:
            info = self.env.ctor_info(first)
            if info is None:
                raise UnknownIdentifier(f"unknown constructor {first!r}")
            ind = info[0]
            decl = self.env.inductives[ind]
            tyargs = tuple(self.fresh_meta() for _ in decl.params)
            self.unify(sty, IndTy(ind, tyargs), "match scrutinee")
            order = [c.name for c in decl.ctors]
            sub = dict(zip(decl.params, tyargs))
            ctor_binders = {c.name: [T.subst_ty(bt, sub) for _, bt in c.binders]
                            for c in decl.ctors}
        got = [b[0] for b in s.branches]
        if got != order:
            raise TypecheckError(
                f"match on {ind} must list constructors in declaration order"
                f" {order}, got {got}")
        rty = self.fresh_meta()
        branches = []
        for cname, binders, rhs in s.branches:
            expect = ctor_binders[cname]
            if len(binders) != len(expect):
                raise ArityError(
                    f"pattern {cname} binds {len(expect)} argument(s),"
                    f" got {len(binders)}")
            inner = dict(locals)
            for n, t in zip(binders, expect):
                inner[n] = t
            r, rt = self.elab_term(rhs, inner)
            self.unify(rt, rty, f"branch {cname}")
            branches.append(Branch(cname, tuple(binders), r))
        return Match(scrut, ind, tuple(branches)), rty


# ---------------------------------------------------------------------------
# Sentence processing


class Program:
    """Result of loading one or more files into an environment."""

    def __init__(self, env: GlobalEnv):
        self.env = env
        self.hyps: list[Hyp] = []
        self.goal: "Goal | None" = None
        self.trakt_commands: list[TraktCommand] = []


def process_sentence(sent, prog: Program) -> None:
    env = prog.env
    el = Elab(env)
    goal_locals = {h.name: h.body for h in prog.hyps if h.is_var}

    if isinstance(sent, SInductive):
        _process_inductive(sent, env)
        return
    if isinstance(sent, SDefinition):
        _process_definition(sent, env)
        return
    if isinstance(sent, SParameter):
        if isinstance(sent.ty, SName) and sent.ty.name == "Type":
            env.declare_base_sort(sent.name)
            return
        sch = el.elab_scheme(sent.ty, {})
        env.declare_def(DefEntry(sent.name, el.zonk_deep(sch), None))
        return
    if isinstance(sent, SVariable):
        ty = el.elab_type(sent.ty, {}, allow_prop=False)
        if any(h.name == sent.name for h in prog.hyps):
            raise T.DuplicateDeclaration(f"variable already declared: {sent.name}")
        prog.hyps.append(Hyp(sent.name, el.zonk_deep(ty)))
        return
    if isinstance(sent, SHypothesis):
        if sent.lemma:
            f = el.zonk_deep(el.elab_formula(sent.body, {}))
            env.declare_lemma(sent.name, f)
        else:
            f = el.zonk_deep(el.elab_formula(sent.body, goal_locals))
            if any(h.name == sent.name for h in prog.hyps):
                raise T.DuplicateDeclaration(f"hypothesis already declared: {sent.name}")
            prog.hyps.append(Hyp(sent.name, f))
        return
    if isinstance(sent, SGoal):
        if prog.goal is not None:
            raise ParseError("only one Goal per load")
        concl = el.zonk_deep(el.elab_formula(sent.body, goal_locals))
        prog.goal = Goal(tuple(prog.hyps), concl)
        return
    if isinstance(sent, TraktCommand):
        prog.trakt_commands.append(sent)
        return
    raise TypeError(f"process_sentence: {sent!r}")


def _process_inductive(s: SInductive, env: GlobalEnv) -> None:
    el = Elab(env)
    locals: dict = {p: TYPE for p in s.params}
    # determine codomain
    index_tys: list = []
    is_prop = False
    arity = s.arity
    while isinstance(arity, SBinop) and arity.op == "->":
        index_tys.append(el.elab_type(arity.lhs, locals))
        arity = arity.rhs
    if arity is not None:
        if not isinstance(arity, SName) or arity.name not in ("Type", "Prop"):
            raise TypecheckError(f"inductive {s.name}: codomain must be Type or Prop")
        is_prop = arity.name == "Prop"
    if index_tys and not is_prop:
        raise TypecheckError(f"inductive {s.name}: indexed types must end in Prop")
    if is_prop and s.params:
        raise TypecheckError(f"relation {s.name}: type parameters not supported")

    # placeholder so constructors can mention the type recursively
    placeholder = InductiveDecl(s.name, tuple(s.params), tuple(index_tys),
                                is_prop, ())
    env.declare_inductive(placeholder)
    try:
        ctors = []
        for cname, sbinders, spec in s.ctors:
            binders: list[tuple[str, object]] = []
            clocals = dict(locals)
            for b in sbinders:
                if isinstance(b.ann, SName) and b.ann.name == "Type":
                    raise TypecheckError("constructors cannot bind type variables")
                ann = el.elab_type(b.ann, clocals)
                for n in b.names:
                    binders.append((n, ann))
                    clocals[n] = ann
            premises: list = []
            indices: list = []
            if spec is None:
                if is_prop:
                    raise TypecheckError(
                        f"constructor {cname} of relation {s.name} needs a result")
            elif not is_prop:
                # arrow-style ADT constructor: a1 -> ... -> I params
                tys: list = []
                cur = spec
                while isinstance(cur, SBinop) and cur.op == "->":
                    tys.append(el.elab_type(cur.lhs, clocals))
                    cur = cur.rhs
                res = el.elab_type(cur, clocals)
                if res != IndTy(s.name, tuple(TypeVar(p) for p in s.params)):
                    raise TypecheckError(
                        f"constructor {cname} must target {s.name}")
                base = len(binders)
                for k, t in enumerate(tys):
                    binders.append((f"x{base + k}" if base + k else "x", t))
            else:
                f = el.elab_formula(spec, clocals)
                f = el.zonk_deep(f)
                while True:
                    if isinstance(f, Forall):
                        if isinstance(f.ann, T.TypeSort):
                            raise TypecheckError(
                                "relation constructors cannot bind type variables")
                        binders.append((f.var, f.ann))
                        f = f.body
                    elif isinstance(f, T.Impl):
                        premises.append(f.lhs)
                        f = f.rhs
                    else:
                        break
                if not (isinstance(f, PredApp) and f.name == s.name):
                    raise TypecheckError(
                        f"constructor {cname} must conclude with {s.name}")
                indices = list(f.args)
            binders = [(n, el.zonk_deep(t)) for n, t in binders]
            ctors.append(CtorDecl(cname, tuple(binders), tuple(premises),
                                  tuple(indices)))
        decl = InductiveDecl(s.name, tuple(s.params), tuple(index_tys),
                             is_prop, tuple(ctors))
    except Exception:
        # roll back the placeholder on failure
        del env.inductives[s.name]
        raise
    env.inductives[s.name] = decl
    for i, c in enumerate(decl.ctors):
        env._ctors[c.name] = (decl.name, i + 1)


def _process_definition(s: SDefinition, env: GlobalEnv) -> None:
    el = Elab(env)
    locals: dict = {}
    ty_vars: list[str] = []
    val_binders: list[tuple[str, object]] = []
    for b in s.binders:
        if isinstance(b.ann, SName) and b.ann.name == "Type":
            if val_binders:
                raise TypecheckError("type binders must precede value binders")
            for n in b.names:
                ty_vars.append(n)
                locals[n] = TYPE
            continue
        if b.ann is None:
            raise TypecheckError(
                f"definition {s.name}: binders need type annotations")
        ann = el.elab_type(b.ann, locals)
        for n in b.names:
            val_binders.append((n, ann))
            locals[n] = ann

    result_ty = None
    if s.result is not None:
        if isinstance(s.result, SName) and s.result.name == "Prop":
            result_ty = PROP
        else:
            result_ty = el.elab_type(s.result, locals)

    if s.fixpoint:
        if not val_binders:
            raise TypecheckError("Fixpoint needs at least one value argument")
        fixty = T.arrow(*[t for _, t in val_binders], result_ty)
        inner = dict(locals)
        inner[s.name] = fixty
        if result_ty == PROP:
            raise TypecheckError("Prop-valued fixpoints are not supported")
        body, bty = el.elab_term(s.body, inner)
        el.unify(bty, result_ty, f"body of {s.name}")
        fn: object = body
        for n, t in reversed(val_binders):
            fn = Lam(n, t, fn)
        fn = Fix(s.name, fixty, fn)
        for v in reversed(ty_vars):
            fn = Lam(v, TYPE, fn)
        scheme = Scheme(tuple(ty_vars), el.zonk(fixty))
        env.declare_def(DefEntry(s.name, el.zonk_deep(scheme), el.zonk_deep(fn)))
        return

    want_formula = (result_ty == PROP or
                    (result_ty is None and el.looks_formula(s.body, locals)))
    if want_formula:
        body = el.elab_formula(s.body, locals)
        bty: object = PROP
    else:
        body, bty = el.elab_term(s.body, locals)
        if result_ty is not None:
            if isinstance(bty, tuple):
                raise TypecheckError(
                    f"{s.name}: a polymorphic body cannot carry a result"
                    " annotation; bind the type arguments before the colon")
            el.unify(bty, result_ty, f"body of {s.name}")
        if isinstance(bty, tuple):
            # bare `Definition c := fun (A : Type) ... => ...`
            vars = []
            while isinstance(bty, tuple) and bty[0] == "scheme":
                vars.append(bty[1])
                bty = bty[2]
            if val_binders or ty_vars:
                raise TypecheckError("mixed type-binder styles in definition")
            scheme = Scheme(tuple(vars), el.zonk(bty))
            env.declare_def(DefEntry(s.name, el.zonk_deep(scheme),
                                     el.zonk_deep(body)))
            return
    term: object = body
    for n, t in reversed(val_binders):
        term = Lam(n, t, term)
    for v in reversed(ty_vars):
        term = Lam(v, TYPE, term)
    vty = T.arrow(*[t for _, t in val_binders], bty) if val_binders else bty
    scheme = Scheme(tuple(ty_vars), el.zonk(vty))
    env.declare_def(DefEntry(s.name, el.zonk_deep(scheme), el.zonk_deep(term)))


# ---------------------------------------------------------------------------
# Public API


def parse_program(text: str, prog: "Program | None" = None) -> Program:
    if prog is None:
        prog = Program(GlobalEnv())
    sentences = Parser(tokenize(text)).parse_file()
    for s in sentences:
        process_sentence(s, prog)
    return prog


def parse_goal_file(text: str, env: "GlobalEnv | None" = None):
    """Parse declarations and a goal; returns (env, goal).

    `goal` is None when the file only declares things.  Trakt commands are
    collected on the returned environment's behalf by `parse_program`; use
    that richer API when you need them.
    """
    prog = Program(env if env is not None else GlobalEnv())
    prog2 = parse_program(text, prog)
    return prog2.env, prog2.goal


def parse_formula(text: str, env: GlobalEnv, locals: "dict | None" = None):
    """Parse and elaborate a single formula (no trailing dot)."""
    p = Parser(tokenize(text))
    s = p.parse_expr(0)
    if p.peek().kind != "eof":
        raise ParseError(f"trailing input: {p.peek().text!r}",
                         p.peek().line, p.peek().col)
    el = Elab(env)
    return el.zonk_deep(el.elab_formula(s, dict(locals or {})))


def parse_term(text: str, env: GlobalEnv, locals: "dict | None" = None):
    p = Parser(tokenize(text))
    s = p.parse_expr(0)
    if p.peek().kind != "eof":
        raise ParseError(f"trailing input: {p.peek().text!r}",
                         p.peek().line, p.peek().col)
    el = Elab(env)
    t, _ = el.elab_term(s, dict(locals or {}))
    return el.zonk_deep(t)
